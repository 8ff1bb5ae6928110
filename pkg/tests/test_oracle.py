import math

import numpy as np
import pytest
from scipy.stats import norm

from catbell import (
    EvolutionSchedule,
    GridSpec,
    RationalPhase,
    T1,
    T2,
    T3,
    bell_normalization,
    bell_state,
    cat_state,
    coherent,
    dist_joint,
    dist_x,
    evolve_two_mode,
    joint_sign_correlation,
    sign_expectation,
    variance_p,
)
from catbell.fock import ModeState, TwoModeState, _coherent_amps, normalize
from catbell.oracle import (
    CoherentSuperposition,
    coherent_overlap,
    kerr_evolved,
    oracle_bell,
    oracle_cat,
    oracle_dist_joint,
    oracle_dist_p,
    oracle_dist_x,
    oracle_sign_correlation,
    oracle_sign_expectation,
    oracle_variance_p,
    position_amplitude,
)


def test_single_coherent_density_is_normal():
    grid = GridSpec.spanning(2)
    cs = CoherentSuperposition.single_mode([(1.0, 2.0)])
    dens = oracle_dist_x(cs, grid).density
    x = grid.nodes()
    ref = norm.pdf(x, loc=2 * math.sqrt(2), scale=math.sqrt(0.5))
    assert np.abs(dens - ref).max() < 1e-12


def test_overlap_function_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = complex(rng.normal(), rng.normal())
        b = complex(rng.normal(), rng.normal())
        assert abs(coherent_overlap(a, b) - coherent_overlap(b, a).conjugate()) < 1e-14
        assert abs(coherent_overlap(a, a) - 1.0) < 1e-14


def test_position_amplitude_normalization():
    x = np.linspace(-12, 12, 2001)
    h = x[1] - x[0]
    for g in (0.0, 1.5, -2.0, 1 + 1j):
        p = np.abs(position_amplitude(g, x)) ** 2
        assert abs(p.sum() * h - 1.0) < 1e-9


def test_cat_density_reproduces_two_hills():
    grid = GridSpec.spanning(2)
    dens = oracle_dist_x(oracle_cat(2.0), grid)
    x = grid.nodes()
    hills = 0.5 * (
        norm.pdf(x, loc=2 * math.sqrt(2), scale=math.sqrt(0.5))
        + norm.pdf(x, loc=-2 * math.sqrt(2), scale=math.sqrt(0.5))
    )
    assert np.abs(dens.density - hills).max() < 1e-7


def test_oracle_variance_values():
    assert oracle_variance_p(0.0) == 0.5
    assert abs(oracle_variance_p(2.0) - 0.49999909971860225) < 1e-15
    for alpha in (1.0, 2.0, 3.0):
        assert abs(variance_p(cat_state(alpha)) - oracle_variance_p(alpha)) < 1e-9


def test_oracle_norm_matches_closed_form_prefactor():
    for a in (2.0, 3.0):
        raw = CoherentSuperposition.two_mode([(1.0, a, -a), (-1.0, -a, a)])
        assert abs(math.sqrt(raw.norm_squared()) - 1.0 / bell_normalization(a, a)) < 1e-12


def test_oracle_cat_agrees_with_engine_distribution():
    grid = GridSpec.spanning(3)
    for alpha in (2.0, 3.0):
        engine = dist_x(cat_state(alpha), grid).density
        closed = oracle_dist_x(oracle_cat(alpha), grid).density
        assert np.abs(engine - closed).max() < 1e-8


def test_oracle_momentum_shifts_imaginary_labels():
    grid = GridSpec.spanning(2.5)
    cs = CoherentSuperposition.single_mode([(1.0, 2j)])
    dens = oracle_dist_p(cs, grid)
    assert abs(dens.mean() - 2 * math.sqrt(2)) < 1e-9


def test_kerr_evolved_branch_weights():
    # Quarter turn splits |g> into cos(pi/8)|g> + i sin(pi/8)|-g> with an
    # overall eighth-turn phase.
    cs = kerr_evolved(CoherentSuperposition.single_mode([(1.0, 2.0)]), T2)
    terms = dict(zip((a[0] for a in cs.alphas), cs.coeffs))
    keep, flip = terms[2.0], terms[-2.0]
    assert abs(abs(keep) - math.cos(math.pi / 8)) < 1e-15
    assert abs(abs(flip) - math.sin(math.pi / 8)) < 1e-15
    assert abs(keep * flip.conjugate() + 1j * math.cos(math.pi / 8) * math.sin(math.pi / 8)) < 1e-15


def test_kerr_evolved_rejects_unsupported_denominator():
    cs = CoherentSuperposition.single_mode([(1.0, 2.0)])
    with pytest.raises(ValueError):
        kerr_evolved(cs, RationalPhase(1, 3))


def test_kerr_evolved_matches_engine_densities():
    rng = np.random.default_rng(77)
    grid = GridSpec.spanning(3)
    dim = 59
    for tau in (T2, T3, RationalPhase(3, 4)):
        coeff = complex(rng.normal(), rng.normal())
        cs = CoherentSuperposition.single_mode([(1.0, 2.5), (coeff, -1.0)]).normalized()
        evolved_cs = kerr_evolved(cs, tau)
        amps = np.zeros(dim, dtype=complex)
        for c, (g,) in zip(cs.coeffs, cs.alphas):
            amps += c * _coherent_amps(g, dim)
        from catbell import evolve_mode

        engine_state = evolve_mode(normalize(ModeState(amps)), tau)
        engine = dist_x(engine_state, grid).density
        closed = oracle_dist_x(evolved_cs, grid).density
        assert np.abs(engine - closed).max() < 1e-8


def test_term_cap_and_mode_checks():
    with pytest.raises(ValueError):
        CoherentSuperposition.single_mode([(1.0, k) for k in range(9)])
    with pytest.raises(ValueError):
        CoherentSuperposition(
            coeffs=(1.0, 1.0), alphas=((1.0,), (1.0, 2.0))
        )
    cs = CoherentSuperposition.single_mode([(1.0, 1.0)])
    with pytest.raises(ValueError):
        oracle_dist_joint(cs, GridSpec(-8, 8), GridSpec(-8, 8))


def test_oracle_sign_expectation_coherent_tail():
    # X ~ Normal(3*sqrt(2), 1/2): <S> = 1 - 2*Phi(-6).
    cs = CoherentSuperposition.single_mode([(1.0, 3.0)])
    expected = 1.0 - 2.0 * norm.cdf(-6.0)
    assert abs(oracle_sign_expectation(cs) - expected) < 1e-12
    assert abs(sign_expectation(coherent(3)) - expected) < 1e-10


def test_oracle_sign_correlation_bell_cases():
    bell = oracle_bell(3.0, 3.0)
    e0 = oracle_sign_correlation(bell).e_value
    # Perfect anticorrelation up to the Gaussian tails crossing zero.
    assert abs(e0 - (-1.0 + 4.0 * norm.cdf(-6.0))) < 1e-12
    evolved = kerr_evolved(bell, T1, T2)
    assert abs(oracle_sign_correlation(evolved).e_value + math.cos(math.pi / 4)) < 1e-6
    # Quarter turn at both sites is a fixed point.
    fixed = kerr_evolved(bell, T2, T2)
    assert abs(oracle_sign_correlation(fixed).e_value - e0) < 1e-12


def test_oracle_sign_correlation_factorizes_products():
    prod = CoherentSuperposition.two_mode([(1.0, 2.0, -1.5)])
    left = CoherentSuperposition.single_mode([(1.0, 2.0)])
    right = CoherentSuperposition.single_mode([(1.0, -1.5)])
    got = oracle_sign_correlation(prod).e_value
    want = oracle_sign_expectation(left) * oracle_sign_expectation(right)
    assert abs(got - want) < 1e-10


def test_oracle_joint_density_matches_engine_bell():
    grid = GridSpec.spanning(3)
    engine = dist_joint(
        evolve_two_mode(bell_state(3, 3), EvolutionSchedule(T2, T1)), grid, grid
    ).density
    closed = oracle_dist_joint(kerr_evolved(oracle_bell(3.0, 3.0), T2, T1), grid, grid).density
    assert np.abs(engine - closed).max() < 1e-8


def test_oracle_vs_engine_sign_correlation_on_evolved_bell():
    bell = bell_state(3, 3)
    for taus in ((T1, T2), (T2, T3), (T3, T1)):
        engine = joint_sign_correlation(
            evolve_two_mode(bell, EvolutionSchedule(*taus))
        ).e_value
        closed = oracle_sign_correlation(
            kerr_evolved(oracle_bell(3.0, 3.0), *taus)
        ).e_value
        assert abs(engine - closed) < 1e-7
