"""Tests for the sequential-convex-approximation lower bounds."""

import numpy as np
import pytest

from l1cert import (
    Family,
    GenSpec,
    SCAConfig,
    SensingMatrix,
    compute_alphas,
    gammahat_exact,
    generate,
    max_kernel_correlation,
    norm_s1,
    s_bound_alphas,
    s_star_exact,
    s_upper_bound,
    sca_lower_bound,
)


def test_two_ones_forced_value():
    A = SensingMatrix(np.array([[1.0, 1.0]]))
    val, wit, _ = sca_lower_bound(A, 1)
    assert val == pytest.approx(0.5, abs=1e-8)
    # the one-dimensional kernel forces x = +-(1/2, -1/2)
    assert np.allclose(np.abs(wit.x), 0.5, atol=1e-6)


def test_trivial_kernel_gives_zero():
    A = SensingMatrix(np.eye(4))
    val, wit, _ = sca_lower_bound(A, 2)
    assert val == 0.0
    assert np.allclose(wit.x, 0.0)


def test_witness_invariants():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=8, seed=1))
    for s in (1, 2, 3):
        val, wit, _ = sca_lower_bound(A, s)
        assert np.abs(wit.x).sum() <= 1 + 1e-9
        assert np.linalg.norm(A.entries @ wit.x) <= 1e-8
        u = wit.u.as_vector(A.n)
        assert wit.value == pytest.approx(float(u @ wit.x), abs=1e-10)
        assert wit.value <= norm_s1(wit.x, s) + 1e-10


def test_lower_bound_below_oracle():
    rng_seeds = range(10)
    hits = 0
    for seed in rng_seeds:
        A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=6, seed=seed))
        truth = gammahat_exact(A, 2)
        val, _, _ = sca_lower_bound(A, 2, SCAConfig(restarts=20, rng_seed=0))
        assert val <= truth + 1e-9
        if val >= truth - 1e-6:
            hits += 1
    # the heuristic should reach the optimum on most small instances
    assert hits >= 8


def test_per_restart_monotone_histories():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=10, seed=3))
    _, _, histories = sca_lower_bound(A, 2)
    assert histories
    for seq in histories:
        assert all(a <= b + 1e-10 for a, b in zip(seq, seq[1:]))


def test_max_kernel_correlation_feasibility():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=7, seed=5))
    u = np.zeros(7)
    u[0] = 1.0
    val, x = max_kernel_correlation(A, u)
    assert np.abs(x).sum() <= 1 + 1e-9
    assert np.linalg.norm(A.entries @ x) <= 1e-8
    assert val == pytest.approx(float(u @ x), abs=1e-10)


def test_s_upper_bound_two_ones():
    A = SensingMatrix(np.array([[1.0, 1.0]]))
    res = s_upper_bound(A)
    assert res.s_bar == 0
    assert res.disproof_found


def test_s_upper_bound_identity_no_disproof():
    A = SensingMatrix(np.eye(4))
    res = s_upper_bound(A)
    assert res.s_bar == 4
    assert not res.disproof_found


def test_s_upper_bound_above_truth():
    for seed in range(4):
        A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=8, seed=seed))
        res = s_upper_bound(A)
        assert res.s_bar >= s_star_exact(A)


def test_bounds_never_cross():
    for seed in range(3):
        A = generate(GenSpec(family=Family.GAUSSIAN, k=4, n=10, seed=seed))
        cert = s_bound_alphas(A)
        res = s_upper_bound(A)
        assert res.s_bar >= cert.s_certified


def test_sandwich_with_alphas():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=7, seed=9))
    for s in (1, 2):
        lo, _, _ = sca_lower_bound(A, s)
        truth = gammahat_exact(A, s)
        hi, _ = compute_alphas(A, s)
        assert lo <= truth + 1e-6
        assert truth <= hi + 1e-6


def test_determinism_with_seed():
    A = generate(GenSpec(family=Family.GAUSSIAN, k=3, n=8, seed=13))
    cfg = SCAConfig(restarts=5, rng_seed=7)
    a = sca_lower_bound(A, 2, cfg)[0]
    b = sca_lower_bound(A, 2, cfg)[0]
    assert a == b
