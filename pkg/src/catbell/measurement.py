"""Sign-binned spin statistics and projective collapse.

The dichotomic observable is the sign of a position-quadrature outcome.
Everything reduces to the half-line overlap matrix
W_mn = integral_0^inf psi_m(x) psi_n(x) dx: the positive-sign projector
is W in the number basis and the negative-sign projector is its parity
conjugate.  A grid-integration route is provided as an independent
cross-check of the matrix route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ZeroProbability
from .fock import ModeState, TwoModeState, WeightedEnsemble
from .quadrature import (
    MAX_TABLE_DIM,
    GridSpec,
    dist_joint,
    dist_x,
    hermite_values,
)

_GL_ORDER = 16
_CONVERGENCE_EPS = 1e-13


def _panel_nodes(length: float, n_panels: int) -> tuple[np.ndarray, np.ndarray]:
    base_x, base_w = leggauss(_GL_ORDER)
    edges = np.linspace(0.0, length, n_panels + 1)
    mid = (edges[:-1] + edges[1:]) / 2.0
    half = (edges[1:] - edges[:-1]) / 2.0
    nodes = (mid[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


def _overlap_at(dim: int, length: float, n_panels: int) -> np.ndarray:
    nodes, weights = _panel_nodes(length, n_panels)
    table = hermite_values(nodes, dim)
    return (table * weights[:, None]).T @ table


@lru_cache(maxsize=None)
def halfline_overlap(dim: int) -> np.ndarray:
    """W_mn = integral over x > 0 of psi_m psi_n, computed by adaptive
    composite Gauss-Legendre panels on [0, sqrt(2*dim) + 8].

    Panel count starts from the top-state oscillation rate and doubles
    until two successive refinements agree to 1e-13.  The result is
    cached per dim and must be treated as read-only.
    """
    if dim > MAX_TABLE_DIM:
        raise ValueError(f"dim {dim} exceeds the supported size {MAX_TABLE_DIM}")
    length = math.sqrt(2.0 * dim) + 8.0
    # ~6 Gauss nodes per half-oscillation of the fastest integrand.
    rate = 2.0 * math.sqrt(2.0 * dim)
    n_panels = max(8, int(math.ceil(length * 6.0 * rate / (math.pi * _GL_ORDER))))
    current = _overlap_at(dim, length, n_panels)
    for _ in range(3):
        n_panels *= 2
        refined = _overlap_at(dim, length, n_panels)
        if float(np.abs(refined - current).max()) < _CONVERGENCE_EPS:
            current = refined
            break
        current = refined
    current.setflags(write=False)
    return current


def negative_halfline_overlap(dim: int) -> np.ndarray:
    """Projector onto x < 0: the parity conjugate (-1)^(m+n) W_mn."""
    w = halfline_overlap(dim)
    signs = np.where(np.arange(dim) % 2 == 0, 1.0, -1.0)
    out = signs[:, None] * w * signs[None, :]
    out.setflags(write=False)
    return out


def _sign_projector(dim: int, sign: int) -> np.ndarray:
    if sign == 1:
        return halfline_overlap(dim)
    if sign == -1:
        return negative_halfline_overlap(dim)
    raise ValueError(f"sign must be +1 or -1, got {sign}")


@dataclass(frozen=True)
class SignCorrelation:
    """Quadrant probabilities of a joint sign measurement and their
    dichotomic correlation e_value = p_pp + p_mm - p_pm - p_mp."""

    p_pp: float
    p_pm: float
    p_mp: float
    p_mm: float

    def __post_init__(self):
        quads = (self.p_pp, self.p_pm, self.p_mp, self.p_mm)
        if min(quads) < -1e-8:
            raise ValueError(f"negative quadrant probability in {quads}")
        total = sum(quads)
        if abs(total - 1.0) > 1e-8:
            raise ValueError(f"quadrant probabilities sum to {total}")

    @property
    def e_value(self) -> float:
        return self.p_pp + self.p_mm - self.p_pm - self.p_mp


def sign_probabilities(state: ModeState) -> tuple[float, float]:
    """(P(+), P(-)) for the sign of a position outcome."""
    c = state.amps
    p_plus = float(np.vdot(c, halfline_overlap(state.dim) @ c).real)
    p_minus = float(np.vdot(c, negative_halfline_overlap(state.dim) @ c).real)
    return p_plus, p_minus


def sign_expectation(state: ModeState) -> float:
    """<S> = P(+) - P(-)."""
    p_plus, p_minus = sign_probabilities(state)
    return p_plus - p_minus


def joint_sign_correlation(state) -> SignCorrelation:
    """Quadrant statistics of the two-site sign measurement.

    Accepts a pure TwoModeState or a WeightedEnsemble (weight-averaged
    quadrants).
    """
    if isinstance(state, WeightedEnsemble):
        quads = np.zeros(4)
        for w, comp in state.components:
            part = joint_sign_correlation(comp)
            quads += w * np.array([part.p_pp, part.p_pm, part.p_mp, part.p_mm])
        return SignCorrelation(*quads)
    if not isinstance(state, TwoModeState):
        raise TypeError("joint_sign_correlation expects TwoModeState or WeightedEnsemble")
    c = state.amps
    quads = []
    for sign_a in (1, -1):
        pa = _sign_projector(state.dim_a, sign_a)
        left = pa @ c
        for sign_b in (1, -1):
            pb = _sign_projector(state.dim_b, sign_b)
            quads.append(float(np.vdot(c, left @ pb).real))
    return SignCorrelation(*quads)


def project_sign(state: TwoModeState, mode: str, sign: int) -> tuple[float, TwoModeState]:
    """Collapse one mode onto a sign sector (state-update rule with the
    half-line projector); returns the outcome probability and the
    renormalized post-measurement state.

    The probability is the Born weight <Pi>, linear in the projector, so
    the two outcomes sum to 1 at the accuracy of projector completeness;
    the post state is renormalized to unit norm.
    """
    if mode == "a":
        proj = _sign_projector(state.dim_a, sign)
        raw = proj @ state.amps
    elif mode == "b":
        proj = _sign_projector(state.dim_b, sign)
        raw = state.amps @ proj
    else:
        raise ValueError(f"mode must be 'a' or 'b', got {mode!r}")
    prob = float(np.vdot(state.amps, raw).real)
    if prob < 1e-14:
        raise ZeroProbability(f"sign {sign:+d} on mode {mode} has probability {prob:.3e}")
    return prob, TwoModeState(raw / np.linalg.norm(raw))


def project_sign_mode(state: ModeState, sign: int) -> tuple[float, ModeState]:
    """Single-mode analogue of project_sign."""
    raw = _sign_projector(state.dim, sign) @ state.amps
    prob = float(np.vdot(state.amps, raw).real)
    if prob < 1e-14:
        raise ZeroProbability(f"sign {sign:+d} has probability {prob:.3e}")
    return prob, ModeState(raw / np.linalg.norm(raw))


def _halved_sign_weights(grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Trapezoid weights split by sign; a node at x = 0 counts half each."""
    x = grid.nodes()
    w = np.full(grid.points, grid.spacing)
    w[0] = w[-1] = grid.spacing / 2.0
    tol = 1e-9 * max(abs(grid.x_min), abs(grid.x_max))
    plus = np.where(x > tol, 1.0, np.where(np.abs(x) <= tol, 0.5, 0.0))
    return w * plus, w * (1.0 - plus)


def sign_expectation_grid(state: ModeState, grid: GridSpec) -> float:
    """Grid-integration route for <S>, cross-checking the matrix route."""
    density = dist_x(state, grid).density
    w_plus, w_minus = _halved_sign_weights(grid)
    return float((w_plus - w_minus) @ density)


def joint_sign_correlation_grid(state, grid_a: GridSpec, grid_b: GridSpec) -> SignCorrelation:
    """Grid-integration route for the joint sign quadrants."""
    density = dist_joint(state, grid_a, grid_b).density
    ap, am = _halved_sign_weights(grid_a)
    bp, bm = _halved_sign_weights(grid_b)
    return SignCorrelation(
        float(ap @ density @ bp),
        float(ap @ density @ bm),
        float(am @ density @ bp),
        float(am @ density @ bm),
    )


def collapse_average(state: TwoModeState, mode: str) -> WeightedEnsemble:
    """Unread measurement: the outcome-weighted ensemble of both collapses."""
    parts = []
    for sign in (1, -1):
        prob, post = project_sign(state, mode, sign)
        parts.append((prob, post))
    total = sum(p for p, _ in parts)
    return WeightedEnsemble(tuple((p / total, s) for p, s in parts))
