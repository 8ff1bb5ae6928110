"""Diagonal evolution generated by the quartic number Hamiltonian.

The generator is proportional to n^4, so a duration tau (in units where
the coupling is 1) multiplies each amplitude c_n by exp(-i*tau*n^4).
Durations are restricted to exact rational multiples of pi: the phase
then reduces modulo 2*pi in integer arithmetic and large-n evaluation is
free of floating-point drift.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .fock import ModeState, TwoModeState, WeightedEnsemble

MAX_DENOMINATOR = 64

_PHASE_RE = re.compile(r"^\s*(-?\d+)\s*(?:/\s*(\d+))?\s*pi\s*$")


@dataclass(frozen=True)
class RationalPhase:
    """Duration tau = (p/q)*pi, stored in lowest terms with q >= 1."""

    p: int
    q: int = 1

    def __post_init__(self):
        p, q = int(self.p), int(self.q)
        if q == 0:
            raise ValueError("zero denominator")
        if q < 0:
            p, q = -p, -q
        g = math.gcd(p, q)
        if g > 1:
            p, q = p // g, q // g
        if q > MAX_DENOMINATOR:
            raise ValueError(f"denominator {q} exceeds {MAX_DENOMINATOR}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def parse(cls, text: str) -> "RationalPhase":
        """Parse strings like ``"1/4 pi"``, ``"3/4 pi"``, ``"0 pi"``, ``"2 pi"``."""
        if text.strip() == "0":
            return cls(0, 1)
        m = _PHASE_RE.match(text)
        if m is None:
            raise ValueError(f"cannot parse duration {text!r}; expected 'p/q pi'")
        return cls(int(m.group(1)), int(m.group(2) or 1))

    def as_fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    @property
    def radians(self) -> float:
        return math.pi * self.p / self.q

    def is_zero(self) -> bool:
        return self.p == 0

    def __add__(self, other: "RationalPhase") -> "RationalPhase":
        f = self.as_fraction() + other.as_fraction()
        return RationalPhase(f.numerator, f.denominator)

    def __sub__(self, other: "RationalPhase") -> "RationalPhase":
        f = self.as_fraction() - other.as_fraction()
        return RationalPhase(f.numerator, f.denominator)

    def __neg__(self) -> "RationalPhase":
        return RationalPhase(-self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q} pi"


ZERO = RationalPhase(0, 1)

# Measurement-protocol waypoints, in units of the inverse coupling.
T1 = RationalPhase(0, 1)
T2 = RationalPhase(1, 4)
T3 = RationalPhase(1, 2)
T4 = RationalPhase(3, 4)


@dataclass(frozen=True)
class EvolutionSchedule:
    """Independent local durations (tau_a, tau_b) for the two sites."""

    tau_a: RationalPhase
    tau_b: RationalPhase

    @classmethod
    def parse(cls, text_a: str, text_b: str) -> "EvolutionSchedule":
        return cls(RationalPhase.parse(text_a), RationalPhase.parse(text_b))

    def __str__(self) -> str:
        return f"({self.tau_a}, {self.tau_b})"


def kerr_phase(n: int, tau: RationalPhase) -> complex:
    """exp(-i*(p*pi/q)*n^4) evaluated without large-float cancellation.

    n^4 * p is reduced modulo 2q in integers, so the returned phase is
    exact up to one trig rounding even for n in the hundreds.
    """
    if n < 0:
        raise ValueError("n must be a nonnegative occupation number")
    two_q = 2 * tau.q
    r = (tau.p * pow(n % two_q, 4, two_q)) % two_q
    if r == 0:
        return 1.0 + 0.0j
    angle = math.pi * r / tau.q
    return complex(math.cos(angle), -math.sin(angle))


def kerr_phase_table(dim: int, tau: RationalPhase) -> np.ndarray:
    """Vector of kerr_phase(n, tau) for n = 0..dim-1."""
    two_q = 2 * tau.q
    n = np.arange(dim, dtype=np.int64) % two_q
    r = (tau.p % two_q) * (n**4 % two_q) % two_q
    angle = np.pi * r / tau.q
    return np.cos(angle) - 1j * np.sin(angle)


def evolve_mode(state: ModeState, tau: RationalPhase) -> ModeState:
    """Apply the diagonal quartic phases to a single mode."""
    if tau.is_zero():
        return state
    return ModeState(state.amps * kerr_phase_table(state.dim, tau))


def evolve_two_mode(state: TwoModeState, sched: EvolutionSchedule) -> TwoModeState:
    """Apply the local quartic phases independently at each site."""
    amps = state.amps
    if not sched.tau_a.is_zero():
        amps = amps * kerr_phase_table(state.dim_a, sched.tau_a)[:, None]
    if not sched.tau_b.is_zero():
        amps = amps * kerr_phase_table(state.dim_b, sched.tau_b)[None, :]
    return TwoModeState(amps) if amps is not state.amps else state


def evolve_ensemble(ens: WeightedEnsemble, sched: EvolutionSchedule) -> WeightedEnsemble:
    """Evolve every component of a mixture; weights are untouched."""
    return WeightedEnsemble(
        tuple((w, evolve_two_mode(s, sched)) for w, s in ens.components)
    )


def evolve(state, sched: EvolutionSchedule):
    """Schedule dispatch for TwoModeState and WeightedEnsemble."""
    if isinstance(state, TwoModeState):
        return evolve_two_mode(state, sched)
    if isinstance(state, WeightedEnsemble):
        return evolve_ensemble(state, sched)
    raise TypeError("evolve expects TwoModeState or WeightedEnsemble")
