"""Difference-map solver: target validation, convergence, determinism."""

import dataclasses

import numpy as np
import pytest

from bitretrieval.diffmap import (
    InvalidAutocorrelationError,
    SolverConfig,
    autocorrelation_target,
    iteration_statistics,
    solve,
    solve_each,
    solve_runs,
)
from bitretrieval.instances import pi_sequence, random_binary, symmetry_related
from bitretrieval.rings import RingElement, autocorrelation, lift_binary

FAST = SolverConfig(max_iterations=2_000_000, seed=1)


# ---------------------------------------------------------------------------
# target preparation


def test_target_from_exact_autocorrelation(pi23):
    alpha = autocorrelation(pi23.element)
    t = autocorrelation_target(alpha)
    assert t.n == 23
    assert t.alpha4[0] == 23
    assert t.alpha4.tolist() == t.alpha4[list(range(1, 23))[::-1] + [0]][[22] + list(range(22))].tolist()  # palindrome tail
    assert np.all(t.sqrt_spec >= 0)
    assert np.allclose(t.mu4, 4.0 * t.sqrt_spec ** 2, atol=1e-9)


def test_target_accepts_lifted_form(pi23):
    exact = autocorrelation_target(autocorrelation(pi23.element))
    lifted = autocorrelation_target(autocorrelation(lift_binary(pi23.element)))
    assert np.array_equal(exact.alpha4, lifted.alpha4)


def test_target_rejects_bad_peak(pi23):
    alpha = autocorrelation(lift_binary(pi23.element))
    with pytest.raises(InvalidAutocorrelationError):
        autocorrelation_target(RingElement(2.0 * alpha.coeffs))


def test_target_rejects_asymmetric_vector():
    v = [23 / 4.0] + [1.0] * 21 + [1.25]
    with pytest.raises(InvalidAutocorrelationError):
        autocorrelation_target(RingElement(v))


def test_target_rejects_negative_spectrum():
    # symmetric quarter-integer vector whose spectrum dips negative
    v = [5 / 4.0, -1.0, 0.25, 0.25, -1.0]
    with pytest.raises(InvalidAutocorrelationError):
        autocorrelation_target(RingElement(v))


def test_target_rejects_non_quarter_integers():
    with pytest.raises(InvalidAutocorrelationError):
        autocorrelation_target(RingElement([23 / 4.0] + [1.01] * 22))


# ---------------------------------------------------------------------------
# solver config


def test_config_defaults_and_replace():
    cfg = SolverConfig()
    assert cfg.beta == 0.7
    assert cfg.ga == pytest.approx(1 / 0.7)
    assert cfg.gb == pytest.approx(-1 / 0.7)
    cfg2 = dataclasses.replace(cfg, beta=0.5, seed=9)
    assert cfg2.ga == pytest.approx(2.0) and cfg2.seed == 9


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(beta=0.0)
    with pytest.raises(ValueError):
        SolverConfig(max_iterations=0)
    with pytest.raises(ValueError):
        SolverConfig(restart_after=0)


# ---------------------------------------------------------------------------
# solving


def test_solve_recovers_small_key():
    key = random_binary(19, seed=3)
    res = solve(autocorrelation(key.element), FAST)
    assert res.converged
    assert res.solution is not None
    assert symmetry_related(res.solution, key)
    # the recovered autocorrelation matches exactly, not just approximately
    assert autocorrelation(res.solution.element) == autocorrelation(key.element)


def test_solve_is_deterministic(pi23):
    alpha = autocorrelation(pi23.element)
    r1 = solve(alpha, FAST)
    r2 = solve(alpha, FAST)
    assert r1.iterations == r2.iterations
    assert r1.solution.element == r2.solution.element


def test_solve_seed_changes_trajectory(pi23):
    alpha = autocorrelation(pi23.element)
    r1 = solve(alpha, FAST)
    r2 = solve(alpha, dataclasses.replace(FAST, seed=2))
    assert r1.iterations != r2.iterations  # astronomically unlikely to tie


def test_budget_exhaustion_reports_failure(pi23):
    alpha = autocorrelation(pi23.element)
    res = solve(alpha, SolverConfig(max_iterations=3, seed=1))
    assert not res.converged
    assert res.solution is None
    assert res.iterations == 3


def test_restart_after_still_solves():
    key = random_binary(19, seed=4)
    cfg = dataclasses.replace(FAST, restart_after=40)
    res = solve(autocorrelation(key.element), cfg)
    assert res.converged
    assert symmetry_related(res.solution, key)


def test_residual_trace_collection(pi23):
    alpha = autocorrelation(pi23.element)
    res = solve(alpha, FAST, trace_every=10)
    assert res.residual_trace
    iters, residuals = zip(*res.residual_trace)
    assert list(iters) == sorted(iters)
    assert all(r >= 0 for r in residuals)
    assert iters[-1] <= res.iterations


def test_solve_runs_are_independent(pi23):
    alpha = autocorrelation(pi23.element)
    results = solve_runs(alpha, 4, FAST)
    assert len(results) == 4
    assert all(r.converged for r in results)
    assert len({r.iterations for r in results}) > 1


def test_solve_each_matches_instances():
    keys = [random_binary(19, seed=s) for s in (7, 8, 9)]
    results = solve_each([autocorrelation(k.element) for k in keys], FAST)
    assert len(results) == 3
    for res, key in zip(results, keys):
        assert res.converged
        assert symmetry_related(res.solution, key)


# ---------------------------------------------------------------------------
# iteration statistics


def test_iteration_statistics_require_30_samples():
    with pytest.raises(ValueError):
        iteration_statistics(range(29))


def test_iteration_statistics_on_synthetic_exponential():
    rng = np.random.default_rng(0)
    xs = rng.exponential(scale=1000.0, size=4000)
    st = iteration_statistics(xs)
    assert st.count == 4000
    assert st.mean == pytest.approx(1000.0, rel=0.1)
    assert 0.9 < st.cv < 1.1
    assert st.ks_deviation < 0.05


def test_iteration_statistics_flag_non_exponential():
    st = iteration_statistics([500.0] * 100)
    assert st.cv == 0.0
    assert st.ks_deviation > 0.3
