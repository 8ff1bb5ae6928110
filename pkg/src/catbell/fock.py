"""Truncated-number-basis states for one or two bosonic modes.

All states carry plain complex amplitude arrays over the number basis
n = 0..dim-1.  Constructors enforce a truncation-tail criterion so that
downstream transforms never see cutoff artifacts.  States are immutable
and every operation here is a pure function.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DimensionMismatch, TruncationTooSmall

# Tail criterion: the top TAIL_ROWS occupation probabilities of any
# constructed state must carry less than TAIL_EPS total mass.
TAIL_ROWS = 5
TAIL_EPS = 1e-12

NORM_EPS = 1e-10


def default_dim(*alphas: complex) -> int:
    """Truncation size for the largest amplitude among ``alphas``.

    dim = ceil(|a|^2 + 10|a| + 20); the Poisson number distribution of a
    coherent state then keeps the tail criterion satisfied for |a| <= 4.
    """
    a = max((abs(complex(x)) for x in alphas), default=0.0)
    return math.ceil(a * a + 10.0 * a + 20.0)


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.array(arr, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class ModeState:
    """Pure state of a single mode: amplitude c_n per number state."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _readonly(self.amps)
        if amps.ndim != 1 or amps.shape[0] < 1:
            raise ValueError("ModeState amplitudes must be a nonempty 1-D array")
        object.__setattr__(self, "amps", amps)

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def number_distribution(self) -> np.ndarray:
        return np.abs(self.amps) ** 2

    def mean_photon_number(self) -> float:
        p = self.number_distribution()
        return float(np.arange(self.dim) @ p)


@dataclass(frozen=True)
class TwoModeState:
    """Pure state of modes A and B: amplitude c_{mn} per number pair."""

    amps: np.ndarray

    def __post_init__(self):
        amps = _readonly(self.amps)
        if amps.ndim != 2 or min(amps.shape) < 1:
            raise ValueError("TwoModeState amplitudes must be a nonempty 2-D array")
        object.__setattr__(self, "amps", amps)

    @property
    def dim_a(self) -> int:
        return self.amps.shape[0]

    @property
    def dim_b(self) -> int:
        return self.amps.shape[1]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def number_marginal(self, mode: str) -> np.ndarray:
        """Occupation probabilities of one mode, the other traced out."""
        p = np.abs(self.amps) ** 2
        if mode == "a":
            return p.sum(axis=1)
        if mode == "b":
            return p.sum(axis=0)
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")


@dataclass(frozen=True)
class WeightedEnsemble:
    """Convex mixture of pure two-mode states."""

    components: tuple

    def __post_init__(self):
        comps = tuple((float(w), s) for w, s in self.components)
        if not comps:
            raise ValueError("ensemble needs at least one component")
        for w, s in comps:
            if w < 0:
                raise ValueError(f"negative ensemble weight {w}")
            if not isinstance(s, TwoModeState):
                raise TypeError("ensemble components must be TwoModeState")
        total = sum(w for w, _ in comps)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"ensemble weights sum to {total}, expected 1")
        object.__setattr__(self, "components", comps)


def _check_tail(probs: np.ndarray, what: str) -> None:
    tail = float(probs[-TAIL_ROWS:].sum())
    if tail >= TAIL_EPS:
        raise TruncationTooSmall(
            f"{what}: tail mass {tail:.3e} in the top {TAIL_ROWS} levels "
            f"(dim {probs.shape[0]} too small)"
        )


def _coherent_amps(alpha: complex, dim: int) -> np.ndarray:
    """c_n = exp(-|a|^2/2) a^n / sqrt(n!), accumulated in the log domain."""
    alpha = complex(alpha)
    if alpha == 0:
        amps = np.zeros(dim, dtype=complex)
        amps[0] = 1.0
        return amps
    n = np.arange(dim)
    log_mag = -abs(alpha) ** 2 / 2.0 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * n * np.angle(alpha))


def coherent(alpha: complex, dim: int | None = None) -> ModeState:
    """Coherent state |alpha> in a ``dim``-level truncation.

    Raises TruncationTooSmall if ``dim`` is too small for |alpha|.
    """
    if dim is None:
        dim = default_dim(alpha)
    amps = _coherent_amps(alpha, dim)
    _check_tail(np.abs(amps) ** 2, f"coherent({alpha})")
    return ModeState(amps / np.linalg.norm(amps))


def cat_state(alpha: float, dim: int | None = None) -> ModeState:
    """Equal-weight superposition (|alpha> + i|-alpha>)/sqrt(2), alpha real > 0.

    The nonzero overlap <alpha|-alpha> is handled by renormalizing the
    truncated amplitude vector exactly.
    """
    a = float(alpha)
    if not a > 0:
        raise ValueError("cat_state requires real alpha > 0")
    if dim is None:
        dim = default_dim(a)
    amps = (_coherent_amps(a, dim) + 1j * _coherent_amps(-a, dim)) / math.sqrt(2.0)
    _check_tail(np.abs(amps) ** 2, f"cat_state({a})")
    return ModeState(amps / np.linalg.norm(amps))


def bell_normalization(alpha: float, beta: float) -> float:
    """Closed-form prefactor making (|a>|-b> - |-a>|b>) a unit vector."""
    return 1.0 / math.sqrt(2.0 * (1.0 - math.exp(-2.0 * alpha**2 - 2.0 * beta**2)))


def bell_state(
    alpha: float,
    beta: float,
    dim_a: int | None = None,
    dim_b: int | None = None,
) -> TwoModeState:
    """Entangled two-mode state N(|alpha>|-beta> - |-alpha>|beta>).

    The intended regime has alpha = beta; unequal values are accepted for
    sweeps but flagged with a warning.
    """
    a, b = float(alpha), float(beta)
    if a != b:
        warnings.warn(
            f"bell_state with alpha={a} != beta={b}: outside the tested regime",
            stacklevel=2,
        )
    if dim_a is None:
        dim_a = default_dim(a)
    if dim_b is None:
        dim_b = default_dim(b)
    amps = np.outer(_coherent_amps(a, dim_a), _coherent_amps(-b, dim_b)) - np.outer(
        _coherent_amps(-a, dim_a), _coherent_amps(b, dim_b)
    )
    nrm = np.linalg.norm(amps)
    if nrm == 0:
        raise ValueError("bell_state is degenerate at alpha = beta = 0")
    state = TwoModeState(amps / nrm)
    _check_tail(state.number_marginal("a"), f"bell_state({a},{b}) mode a")
    _check_tail(state.number_marginal("b"), f"bell_state({a},{b}) mode b")
    return state


def mixture(
    alpha: float,
    beta: float,
    dim_a: int | None = None,
    dim_b: int | None = None,
) -> WeightedEnsemble:
    """Non-entangled 50/50 blend of the product states |a>|-b> and |-a>|b>."""
    a, b = float(alpha), float(beta)
    if dim_a is None:
        dim_a = default_dim(a)
    if dim_b is None:
        dim_b = default_dim(b)
    first = tensor(coherent(a, dim_a), coherent(-b, dim_b))
    second = tensor(coherent(-a, dim_a), coherent(b, dim_b))
    return WeightedEnsemble(((0.5, first), (0.5, second)))


def tensor(a: ModeState, b: ModeState) -> TwoModeState:
    """Product state of two single-mode states."""
    return TwoModeState(np.outer(a.amps, b.amps))


def inner(a, b) -> complex:
    """Inner product <a|b>, conjugate-linear in the first argument."""
    if isinstance(a, ModeState) and isinstance(b, ModeState):
        if a.dim != b.dim:
            raise DimensionMismatch(f"mode dims differ: {a.dim} vs {b.dim}")
        return complex(np.vdot(a.amps, b.amps))
    if isinstance(a, TwoModeState) and isinstance(b, TwoModeState):
        if (a.dim_a, a.dim_b) != (b.dim_a, b.dim_b):
            raise DimensionMismatch(
                f"two-mode dims differ: {(a.dim_a, a.dim_b)} vs {(b.dim_a, b.dim_b)}"
            )
        return complex(np.vdot(a.amps, b.amps))
    raise TypeError("inner expects two ModeState or two TwoModeState operands")


def fidelity(a, b) -> float:
    """|<a|b>|^2 between normalized states; insensitive to global phase."""
    return abs(inner(a, b)) ** 2


def normalize(state):
    """Rescale a state to unit norm (type preserved)."""
    nrm = state.norm()
    if nrm == 0:
        raise ValueError("cannot normalize the zero vector")
    if isinstance(state, ModeState):
        return ModeState(state.amps / nrm)
    if isinstance(state, TwoModeState):
        return TwoModeState(state.amps / nrm)
    raise TypeError("normalize expects ModeState or TwoModeState")
