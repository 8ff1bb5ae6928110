import cmath
import math

import numpy as np
import pytest

from catbell import (
    EvolutionSchedule,
    RationalPhase,
    T1,
    T2,
    T3,
    T4,
    bell_state,
    cat_state,
    coherent,
    evolve_ensemble,
    evolve_mode,
    evolve_two_mode,
    fidelity,
    kerr_phase,
    kerr_phase_table,
    mixture,
    normalize,
)
from catbell.fock import ModeState, TwoModeState


def exact_phase(n: int, tau: RationalPhase) -> complex:
    # Independent big-integer route: reduce the full product p*n^4 mod 2q.
    r = (tau.p * n**4) % (2 * tau.q)
    return cmath.exp(-1j * math.pi * r / tau.q)


def test_rational_phase_normalization():
    assert (RationalPhase(2, 8).p, RationalPhase(2, 8).q) == (1, 4)
    assert (RationalPhase(1, -4).p, RationalPhase(1, -4).q) == (-1, 4)
    assert RationalPhase(0, 7) == RationalPhase(0, 1)
    with pytest.raises(ValueError):
        RationalPhase(1, 0)
    with pytest.raises(ValueError):
        RationalPhase(1, 128)


def test_rational_phase_parse_and_str():
    assert RationalPhase.parse("1/4 pi") == T2
    assert RationalPhase.parse("3/4 pi") == T4
    assert RationalPhase.parse("0 pi") == T1
    assert RationalPhase.parse("0") == T1
    assert RationalPhase.parse("2 pi") == RationalPhase(2, 1)
    assert RationalPhase.parse("-1/2 pi") == RationalPhase(-1, 2)
    assert str(T4) == "3/4 pi"
    assert RationalPhase.parse(str(T2)) == T2
    with pytest.raises(ValueError):
        RationalPhase.parse("0.25 pi")


def test_rational_phase_arithmetic():
    assert T3 - T2 == T2
    assert T2 + T2 == T3
    assert -T2 == RationalPhase(-1, 4)
    assert (T3 - T3).is_zero()


def test_kerr_phase_zero_duration():
    for n in (0, 1, 7, 123):
        assert kerr_phase(n, T1) == 1.0 + 0.0j


def test_kerr_phase_quarter_turn_even_exact():
    # n = 2: n^4 = 16, (pi/4)*16 is a full number of turns.
    assert kerr_phase(2, T2) == 1.0 + 0.0j
    table = kerr_phase_table(12, T2)
    assert np.all(table[0::2] == 1.0 + 0.0j)


def test_kerr_phase_quarter_turn_odd():
    # odd^4 = 1 mod 8, so every odd level picks up the same eighth turn.
    expected = cmath.exp(-1j * math.pi / 4)
    for n in range(1, 201, 2):
        assert abs(kerr_phase(n, T2) - expected) < 1e-15


def test_kerr_phase_matches_big_integer_route():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(0, 500))
        tau = RationalPhase(int(rng.integers(-40, 40)), int(rng.integers(1, 64)))
        assert abs(kerr_phase(n, tau) - exact_phase(n, tau)) < 1e-12


def _superposition_target(alpha: float, weight_angle: float, dim: int) -> ModeState:
    from catbell.fock import _coherent_amps

    amps = math.cos(weight_angle) * _coherent_amps(alpha, dim) + 1j * math.sin(
        weight_angle
    ) * _coherent_amps(-alpha, dim)
    return normalize(ModeState(amps))


@pytest.mark.parametrize("alpha", [2.0, 3.0])
def test_checkpoint_fidelities(alpha):
    start = coherent(alpha)
    checkpoints = [
        (T2, math.pi / 8),        # quarter turn: cos(pi/8)|a> + i sin(pi/8)|-a>
        (T3, math.pi / 4),        # half turn: the equal-weight cat
        (T4, 3 * math.pi / 8),    # three-quarter turn
    ]
    for tau, angle in checkpoints:
        evolved = evolve_mode(start, tau)
        target = _superposition_target(alpha, angle, start.dim)
        assert abs(fidelity(evolved, target) - 1.0) < 1e-9


@pytest.mark.parametrize("alpha", [2.0, 3.0])
def test_bell_fixed_point(alpha):
    bell = bell_state(alpha, alpha)
    evolved = evolve_two_mode(bell, EvolutionSchedule(T2, T2))
    assert abs(fidelity(evolved, bell) - 1.0) < 1e-9
    # The global phase is an exact eighth turn per site.
    phase = cmath.exp(-1j * math.pi / 4)
    assert np.abs(evolved.amps - phase * bell.amps).max() < 1e-14


def test_unitarity_random_states_and_schedules():
    rng = np.random.default_rng(7)
    for _ in range(25):
        dim = int(rng.integers(4, 80))
        state = normalize(
            ModeState(rng.normal(size=dim) + 1j * rng.normal(size=dim))
        )
        tau = RationalPhase(int(rng.integers(-64, 64)), int(rng.integers(1, 64)))
        assert abs(evolve_mode(state, tau).norm() - 1.0) < 1e-14
    amps = rng.normal(size=(12, 15)) + 1j * rng.normal(size=(12, 15))
    two = TwoModeState(amps / np.linalg.norm(amps))
    sched = EvolutionSchedule(RationalPhase(5, 12), RationalPhase(-3, 7))
    assert abs(evolve_two_mode(two, sched).norm() - 1.0) < 1e-14


def test_full_turn_is_identity_exactly():
    full = RationalPhase(2, 1)
    table = kerr_phase_table(300, full)
    assert np.all(table == 1.0 + 0.0j)
    state = coherent(3)
    assert np.array_equal(evolve_mode(state, full).amps, state.amps)


def test_local_factorization_exact():
    bell = bell_state(3, 3)
    sched = EvolutionSchedule(T2, T4)
    one_step = evolve_two_mode(bell, sched)
    a_only = evolve_two_mode(bell, EvolutionSchedule(T2, T1))
    then_b = evolve_two_mode(a_only, EvolutionSchedule(T1, T4))
    assert np.array_equal(one_step.amps, then_b.amps)


def test_ensemble_evolution_preserves_weights():
    ens = mixture(2, 2)
    evolved = evolve_ensemble(ens, EvolutionSchedule(T2, T3))
    assert [w for w, _ in evolved.components] == [w for w, _ in ens.components]
    for (_, before), (_, after) in zip(ens.components, evolved.components):
        assert abs(after.norm() - before.norm()) < 1e-14


def test_evolution_preserves_cat_identity():
    # Quarter turn of an already-evolved state composes: T2 then T2 = T3.
    start = coherent(2)
    two_steps = evolve_mode(evolve_mode(start, T2), T2)
    assert abs(fidelity(two_steps, cat_state(2)) - 1.0) < 1e-9
