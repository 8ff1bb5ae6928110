"""Closed-form reference results for superpositions of coherent states.

Everything here is evaluated from Gaussian algebra, never from the
truncated number basis, so these routines serve as an independent check
of the Fock-space engine.  The position amplitude of a coherent state
with complex label g is

    <x|g> = pi^(-1/4) exp(-x^2/2 + sqrt(2) g x - g^2/2 - |g|^2/2),

pairwise products of which stay Gaussian; sign-binned statistics reduce
to erf terms.  erf/erfc come from scipy.special (documented accuracy
better than 1e-15), which keeps runs bit-reproducible on a fixed stack.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erf

from .dynamics import RationalPhase
from .measurement import SignCorrelation
from .quadrature import DistributionGrid1D, DistributionGrid2D, GridSpec

MAX_TERMS = 8


def coherent_overlap(a: complex, b: complex) -> complex:
    """<a|b> = exp(-|a|^2/2 - |b|^2/2 + conj(a) b)."""
    a, b = complex(a), complex(b)
    return cmath.exp(-abs(a) ** 2 / 2.0 - abs(b) ** 2 / 2.0 + a.conjugate() * b)


def position_amplitude(gamma: complex, x: np.ndarray) -> np.ndarray:
    """<x|gamma> for a (possibly complex) coherent label."""
    g = complex(gamma)
    x = np.asarray(x, dtype=float)
    return math.pi ** -0.25 * np.exp(
        -(x**2) / 2.0 + math.sqrt(2.0) * g * x - g * g / 2.0 - abs(g) ** 2 / 2.0
    )


@dataclass(frozen=True)
class CoherentSuperposition:
    """sum_k coeffs[k] |alphas[k][0]> (x) |alphas[k][1]> (x) ...

    At most MAX_TERMS terms; one or two modes.
    """

    coeffs: tuple
    alphas: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coeffs)
        alphas = tuple(tuple(complex(a) for a in term) for term in self.alphas)
        if len(coeffs) != len(alphas):
            raise ValueError("coefficient and label counts differ")
        if not 1 <= len(coeffs) <= MAX_TERMS:
            raise ValueError(f"need 1..{MAX_TERMS} terms, got {len(coeffs)}")
        n_modes = {len(term) for term in alphas}
        if len(n_modes) != 1 or n_modes.pop() not in (1, 2):
            raise ValueError("terms must share one or two modes")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "alphas", alphas)

    @property
    def n_terms(self) -> int:
        return len(self.coeffs)

    @property
    def n_modes(self) -> int:
        return len(self.alphas[0])

    @classmethod
    def single_mode(cls, terms) -> "CoherentSuperposition":
        """Build from (coefficient, alpha) pairs."""
        return cls(tuple(c for c, _ in terms), tuple((a,) for _, a in terms))

    @classmethod
    def two_mode(cls, terms) -> "CoherentSuperposition":
        """Build from (coefficient, alpha_a, alpha_b) triples."""
        return cls(tuple(c for c, _, _ in terms), tuple((a, b) for _, a, b in terms))

    def mode_labels(self, mode: int) -> tuple:
        return tuple(term[mode] for term in self.alphas)

    def norm_squared(self) -> float:
        """<psi|psi> from pairwise overlaps, exact up to erf-free algebra."""
        total = 0.0j
        for j in range(self.n_terms):
            for k in range(self.n_terms):
                ov = 1.0 + 0.0j
                for mode in range(self.n_modes):
                    ov *= coherent_overlap(self.alphas[j][mode], self.alphas[k][mode])
                total += self.coeffs[j].conjugate() * self.coeffs[k] * ov
        return float(total.real)

    def normalized(self) -> "CoherentSuperposition":
        scale = 1.0 / math.sqrt(self.norm_squared())
        return CoherentSuperposition(
            tuple(c * scale for c in self.coeffs), self.alphas
        )

    def map_labels(self, fn) -> "CoherentSuperposition":
        return CoherentSuperposition(
            self.coeffs,
            tuple(tuple(fn(a) for a in term) for term in self.alphas),
        )


def oracle_cat(alpha: float) -> CoherentSuperposition:
    """(|a> + i|-a>)/sqrt(2), renormalized exactly."""
    inv = 1.0 / math.sqrt(2.0)
    return CoherentSuperposition.single_mode(
        [(inv, alpha), (1j * inv, -alpha)]
    ).normalized()


def oracle_bell(alpha: float, beta: float) -> CoherentSuperposition:
    """|a>|-b> - |-a>|b>, renormalized exactly."""
    return CoherentSuperposition.two_mode(
        [(1.0, alpha, -beta), (-1.0, -alpha, beta)]
    ).normalized()


def kerr_evolved(cs: CoherentSuperposition, *taus: RationalPhase) -> CoherentSuperposition:
    """Quartic-phase evolution of each mode by the given durations.

    Valid for denominators 1, 2 and 4 only, where the diagonal phases
    take just two values: 1 on even occupations and exp(-i*tau) on odd
    ones, so each coherent label g splits into the pair {g, -g}:

        U|g> = (1+exp(-i*tau))/2 |g> + (1-exp(-i*tau))/2 |-g>.
    """
    if len(taus) != cs.n_modes:
        raise ValueError("one duration per mode required")
    coeffs = list(cs.coeffs)
    alphas = [list(term) for term in cs.alphas]
    for mode, tau in enumerate(taus):
        if tau.q not in (1, 2, 4):
            raise ValueError(
                f"oracle evolution supports denominators 1, 2, 4; got {tau}"
            )
        if tau.is_zero():
            continue
        phase = cmath.exp(-1j * tau.radians)
        keep = (1.0 + phase) / 2.0
        flip = (1.0 - phase) / 2.0
        new_coeffs, new_alphas = [], []
        for c, term in zip(coeffs, alphas):
            new_coeffs.append(c * keep)
            new_alphas.append(list(term))
            flipped = list(term)
            flipped[mode] = -flipped[mode]
            new_coeffs.append(c * flip)
            new_alphas.append(flipped)
        coeffs, alphas = new_coeffs, new_alphas
    merged = _merge_terms(coeffs, alphas)
    return CoherentSuperposition(*merged)


def _merge_terms(coeffs, alphas):
    """Combine terms with identical labels so the term cap stays tight."""
    seen: dict = {}
    order = []
    for c, term in zip(coeffs, alphas):
        key = tuple(complex(a) for a in term)
        if key in seen:
            seen[key] += c
        else:
            seen[key] = c
            order.append(key)
    kept = [(seen[k], k) for k in order if abs(seen[k]) > 1e-15]
    if not kept:
        raise ValueError("evolution cancelled every term")
    return tuple(c for c, _ in kept), tuple(k for _, k in kept)


def oracle_dist_x(cs: CoherentSuperposition, grid: GridSpec) -> DistributionGrid1D:
    """Exact position density of a normalized single-mode superposition."""
    if cs.n_modes != 1:
        raise ValueError("oracle_dist_x expects a single-mode superposition")
    x = grid.nodes()
    wave = np.zeros(grid.points, dtype=complex)
    for c, (g,) in zip(cs.coeffs, cs.alphas):
        wave += c * position_amplitude(g, x)
    return DistributionGrid1D(grid, np.abs(wave) ** 2)


def oracle_dist_p(cs: CoherentSuperposition, grid: GridSpec) -> DistributionGrid1D:
    """Momentum density: position density under g -> -i*g."""
    return oracle_dist_x(cs.map_labels(lambda g: -1j * g), grid)


def oracle_dist_joint(
    cs: CoherentSuperposition, grid_a: GridSpec, grid_b: GridSpec
) -> DistributionGrid2D:
    """Exact joint position density of a two-mode superposition."""
    if cs.n_modes != 2:
        raise ValueError("oracle_dist_joint expects a two-mode superposition")
    wave = np.zeros((grid_a.points, grid_b.points), dtype=complex)
    xa, xb = grid_a.nodes(), grid_b.nodes()
    for c, (ga, gb) in zip(cs.coeffs, cs.alphas):
        wave += c * np.outer(position_amplitude(ga, xa), position_amplitude(gb, xb))
    return DistributionGrid2D(grid_a, grid_b, np.abs(wave) ** 2)


def oracle_variance_p(alpha: float) -> float:
    """Momentum variance of the equal-weight cat: 1/2 - 2 a^2 exp(-4 a^2)."""
    a = float(alpha)
    return 0.5 - 2.0 * a * a * math.exp(-4.0 * a * a)


def _sign_moments(ga: complex, gb: complex) -> tuple[complex, complex]:
    """(overlap-weighted halfline integral, full overlap) for one mode pair.

    integral_0^inf <ga|x><x|gb> dx = <ga|gb> * (1 + erf(m)) / 2 with
    m = (conj(ga) + gb)/sqrt(2); the identity extends to complex labels
    by contour shift.
    """
    ov = coherent_overlap(ga, gb)
    m = (ga.conjugate() + gb) / math.sqrt(2.0)
    plus = ov * (1.0 + complex(erf(m))) / 2.0
    return plus, ov


def oracle_sign_expectation(cs: CoherentSuperposition) -> float:
    """<S> of a normalized single-mode superposition via erf terms."""
    if cs.n_modes != 1:
        raise ValueError("oracle_sign_expectation expects a single-mode superposition")
    total = 0.0j
    for j in range(cs.n_terms):
        for k in range(cs.n_terms):
            plus, ov = _sign_moments(cs.alphas[j][0], cs.alphas[k][0])
            total += cs.coeffs[j].conjugate() * cs.coeffs[k] * (2.0 * plus - ov)
    return float(total.real)


def oracle_sign_correlation(cs: CoherentSuperposition) -> SignCorrelation:
    """Joint sign quadrants of a normalized two-mode superposition.

    Intended for real labels (evolved cat/Bell protocol states); complex
    labels are handled through the complex-capable erf.
    """
    if cs.n_modes != 2:
        raise ValueError("oracle_sign_correlation expects a two-mode superposition")
    quads = np.zeros(4, dtype=complex)
    for j in range(cs.n_terms):
        cc = cs.coeffs[j].conjugate()
        for k in range(cs.n_terms):
            plus_a, ov_a = _sign_moments(cs.alphas[j][0], cs.alphas[k][0])
            plus_b, ov_b = _sign_moments(cs.alphas[j][1], cs.alphas[k][1])
            minus_a = ov_a - plus_a
            minus_b = ov_b - plus_b
            w = cc * cs.coeffs[k]
            quads += w * np.array(
                [plus_a * plus_b, plus_a * minus_b, minus_a * plus_b, minus_a * minus_b]
            )
    return SignCorrelation(*[float(q.real) for q in quads])
