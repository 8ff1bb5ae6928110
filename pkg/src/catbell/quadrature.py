"""Position-representation transforms and quadrature moments.

Conventions: X = (a + a^dag)/sqrt(2), P = (a - a^dag)/(i*sqrt(2)), so the
vacuum has variance 1/2 in both quadratures.  Position densities come
from the oscillator eigenfunctions psi_n(x); moments are computed
algebraically from ladder-operator matrix elements so that grid
resolution never contaminates them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import GridTooSmall
from .fock import ModeState, TwoModeState, WeightedEnsemble

MAX_TABLE_DIM = 512

# Densities integrate to 1 within this tolerance on any accepted grid.
INTEGRAL_EPS = 1e-6
# Rounding may push a density value this far below zero; it is clamped.
NEGATIVE_FLOOR = -1e-12
BOUNDARY_EPS = 1e-10

DEFAULT_POINTS = 401


@dataclass(frozen=True)
class GridSpec:
    """Uniform quadrature-axis grid."""

    x_min: float
    x_max: float
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise ValueError(f"empty grid range [{self.x_min}, {self.x_max}]")
        if self.points < 2:
            raise ValueError("grid needs at least 2 points")

    @classmethod
    def spanning(cls, *alphas: complex, points: int = DEFAULT_POINTS) -> "GridSpec":
        """Symmetric span sqrt(2)*max|alpha| + 6, covering every Gaussian hill."""
        a = max((abs(complex(x)) for x in alphas), default=0.0)
        half = math.sqrt(2.0) * a + 6.0
        return cls(-half, half, points)

    @property
    def spacing(self) -> float:
        return (self.x_max - self.x_min) / (self.points - 1)

    def nodes(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.points)


def _clamp_density(values: np.ndarray, what: str) -> np.ndarray:
    worst = float(values.min(initial=0.0))
    if worst < NEGATIVE_FLOOR:
        raise ValueError(f"{what}: density {worst:.3e} below the rounding floor")
    return np.maximum(values, 0.0)


@dataclass(frozen=True)
class DistributionGrid1D:
    """Probability density sampled on a 1-D grid."""

    grid: GridSpec
    density: np.ndarray

    def __post_init__(self):
        d = np.array(self.density, dtype=float)
        d = _clamp_density(d, "DistributionGrid1D")
        d.setflags(write=False)
        object.__setattr__(self, "density", d)
        total = self.integral()
        if abs(total - 1.0) > INTEGRAL_EPS:
            raise ValueError(f"density integrates to {total}, expected 1")

    def integral(self) -> float:
        return float(trapezoid(self.density, dx=self.grid.spacing))

    def mean(self) -> float:
        x = self.grid.nodes()
        return float(trapezoid(x * self.density, dx=self.grid.spacing))

    def variance(self) -> float:
        x = self.grid.nodes()
        m = self.mean()
        return float(trapezoid((x - m) ** 2 * self.density, dx=self.grid.spacing))


@dataclass(frozen=True)
class DistributionGrid2D:
    """Joint probability density sampled on a 2-D grid (axis a first)."""

    grid_a: GridSpec
    grid_b: GridSpec
    density: np.ndarray

    def __post_init__(self):
        d = np.array(self.density, dtype=float)
        if d.shape != (self.grid_a.points, self.grid_b.points):
            raise ValueError("2-D density shape does not match its grids")
        d = _clamp_density(d, "DistributionGrid2D")
        d.setflags(write=False)
        object.__setattr__(self, "density", d)
        total = self.integral()
        if abs(total - 1.0) > INTEGRAL_EPS:
            raise ValueError(f"density integrates to {total}, expected 1")

    def integral(self) -> float:
        inner = trapezoid(self.density, dx=self.grid_b.spacing, axis=1)
        return float(trapezoid(inner, dx=self.grid_a.spacing))


def hermite_values(x: np.ndarray, dim: int) -> np.ndarray:
    """Oscillator eigenfunctions psi_n(x) for n < dim, shape (len(x), dim).

    psi_0 = pi^(-1/4) exp(-x^2/2) and the stable upward recurrence
    psi_{n+1} = sqrt(2/(n+1)) x psi_n - sqrt(n/(n+1)) psi_{n-1}.
    """
    if dim > MAX_TABLE_DIM:
        raise ValueError(f"dim {dim} exceeds the supported table size {MAX_TABLE_DIM}")
    x = np.asarray(x, dtype=float)
    table = np.zeros((x.shape[0], dim))
    table[:, 0] = math.pi ** -0.25 * np.exp(-(x**2) / 2.0)
    if dim > 1:
        table[:, 1] = math.sqrt(2.0) * x * table[:, 0]
    for n in range(1, dim - 1):
        table[:, n + 1] = (
            math.sqrt(2.0 / (n + 1)) * x * table[:, n]
            - math.sqrt(n / (n + 1)) * table[:, n - 1]
        )
    return table


def hermite_table(grid: GridSpec, dim: int) -> np.ndarray:
    """psi_n evaluated on the grid nodes, shape (points, dim)."""
    return hermite_values(grid.nodes(), dim)


def _check_boundary_1d(density: np.ndarray, what: str) -> None:
    edge = max(float(density[0]), float(density[-1]))
    if edge > BOUNDARY_EPS:
        raise GridTooSmall(f"{what}: boundary density {edge:.3e} (grid span too small)")


def dist_x(state: ModeState, grid: GridSpec) -> DistributionGrid1D:
    """Position density P(x) = |sum_n c_n psi_n(x)|^2."""
    table = hermite_table(grid, state.dim)
    wave = table @ state.amps
    density = np.abs(wave) ** 2
    _check_boundary_1d(density, "dist_x")
    return DistributionGrid1D(grid, density)


def p_rotated(state: ModeState) -> ModeState:
    """Quarter-turn phase-space rotation c_n -> (-i)^n c_n.

    The position density of the rotated state is the momentum density of
    the original, and applying the rotation twice yields the parity map.
    """
    k = np.arange(state.dim) % 4
    rot = np.choose(k, [1.0 + 0.0j, -1.0j, -1.0 + 0.0j, 1.0j])
    return ModeState(state.amps * rot)


def dist_p(state: ModeState, grid: GridSpec) -> DistributionGrid1D:
    """Momentum density, via dist_x of the quarter-turn rotated state."""
    rotated = p_rotated(state)
    table = hermite_table(grid, state.dim)
    wave = table @ rotated.amps
    density = np.abs(wave) ** 2
    _check_boundary_1d(density, "dist_p")
    return DistributionGrid1D(grid, density)


def dist_joint(state, grid_a: GridSpec, grid_b: GridSpec) -> DistributionGrid2D:
    """Joint position density P(x_a, x_b) for a state or ensemble.

    Pure states use the two-sided basis transform table_a @ amps @
    table_b^T; ensembles contribute the weighted sum of their component
    densities.
    """
    if isinstance(state, WeightedEnsemble):
        density = None
        for w, comp in state.components:
            part = w * _joint_density(comp, grid_a, grid_b)
            density = part if density is None else density + part
    elif isinstance(state, TwoModeState):
        density = _joint_density(state, grid_a, grid_b)
    else:
        raise TypeError("dist_joint expects TwoModeState or WeightedEnsemble")
    edge = max(
        float(density[0].max()),
        float(density[-1].max()),
        float(density[:, 0].max()),
        float(density[:, -1].max()),
    )
    if edge > BOUNDARY_EPS:
        raise GridTooSmall(f"dist_joint: boundary density {edge:.3e}")
    return DistributionGrid2D(grid_a, grid_b, density)


def _joint_density(state: TwoModeState, grid_a: GridSpec, grid_b: GridSpec) -> np.ndarray:
    table_a = hermite_table(grid_a, state.dim_a)
    table_b = hermite_table(grid_b, state.dim_b)
    wave = table_a @ state.amps @ table_b.T
    return np.abs(wave) ** 2


def _ladder_moments(state: ModeState) -> tuple[complex, complex, float]:
    """(<a>, <a^2>, <n>) from amplitude contractions."""
    c = state.amps
    n = np.arange(state.dim)
    a1 = complex(np.sum(np.conj(c[:-1]) * c[1:] * np.sqrt(n[1:])))
    a2 = complex(np.sum(np.conj(c[:-2]) * c[2:] * np.sqrt(n[1:-1] * n[2:])))
    nbar = float(n @ (np.abs(c) ** 2))
    return a1, a2, nbar


def mean_x(state: ModeState) -> float:
    a1, _, _ = _ladder_moments(state)
    return math.sqrt(2.0) * a1.real


def mean_p(state: ModeState) -> float:
    a1, _, _ = _ladder_moments(state)
    return math.sqrt(2.0) * a1.imag


def variance_x(state: ModeState) -> float:
    a1, a2, nbar = _ladder_moments(state)
    second = (1.0 + 2.0 * nbar + 2.0 * a2.real) / 2.0
    return second - 2.0 * a1.real**2


def variance_p(state: ModeState) -> float:
    a1, a2, nbar = _ladder_moments(state)
    second = (1.0 + 2.0 * nbar - 2.0 * a2.real) / 2.0
    return second - 2.0 * a1.imag**2
