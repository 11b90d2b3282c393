"""Tests for the linear-program interface: statuses, certificates, duality."""

import numpy as np
import pytest

from l1cert import ArgumentError, LinearProgram, LPStatus, solve_lp


def test_optimal_simple_bound():
    # min x s.t. x >= 1
    p = LinearProgram(c=np.array([1.0]), lo=np.array([1.0]))
    sol = solve_lp(p)
    assert sol.status is LPStatus.OPTIMAL
    assert sol.primal[0] == pytest.approx(1.0, abs=1e-8)
    assert sol.objective_value == pytest.approx(1.0, abs=1e-8)


def test_infeasible_with_certificate():
    # min x s.t. x <= 0 and x >= 1
    p = LinearProgram(c=np.array([1.0]),
                      G=np.array([[1.0]]), h=np.array([0.0]),
                      lo=np.array([1.0]))
    sol = solve_lp(p)
    assert sol.status is LPStatus.INFEASIBLE
    # a Farkas-type ray must be attached in the dual slot
    assert sol.dual_ineq is not None


def test_unbounded_with_ray():
    # min -x s.t. x >= 0
    p = LinearProgram(c=np.array([-1.0]), lo=np.array([0.0]))
    sol = solve_lp(p)
    assert sol.status is LPStatus.UNBOUNDED
    # descent ray points along +x
    assert sol.primal is not None
    assert sol.primal[0] > 0


def test_equality_block():
    # min x + y s.t. x + y = 2, x,y >= 0
    p = LinearProgram(c=np.array([1.0, 1.0]),
                      E=np.array([[1.0, 1.0]]), f=np.array([2.0]),
                      lo=np.zeros(2))
    sol = solve_lp(p)
    assert sol.status is LPStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(2.0, abs=1e-8)


def test_dimension_mismatch_raises():
    with pytest.raises(ArgumentError):
        LinearProgram(c=np.ones(2), G=np.ones((1, 3)), h=np.ones(1))
    with pytest.raises(ArgumentError):
        LinearProgram(c=np.ones(2), E=np.ones((2, 2)), f=np.ones(1))


def test_strong_duality_on_optimal_returns():
    rng = np.random.default_rng(0)
    for _ in range(20):
        d = rng.integers(2, 8)
        m = rng.integers(1, 6)
        G = rng.normal(size=(m, d))
        z0 = rng.normal(size=d)
        h = G @ z0 + rng.uniform(0.1, 1.0, size=m)  # strictly feasible
        p = LinearProgram(c=rng.normal(size=d), G=G, h=h,
                          lo=np.full(d, -5.0), hi=np.full(d, 5.0))
        sol = solve_lp(p)
        assert sol.status is LPStatus.OPTIMAL
        assert sol.duality_gap <= 1e-8


def test_determinism():
    rng = np.random.default_rng(1)
    G = rng.normal(size=(4, 6))
    h = rng.uniform(1.0, 2.0, size=4)
    p = LinearProgram(c=rng.normal(size=6), G=G, h=h,
                      lo=np.full(6, -3.0), hi=np.full(6, 3.0))
    a = solve_lp(p)
    b = solve_lp(p)
    assert np.array_equal(a.primal, b.primal)
    assert a.objective_value == b.objective_value


def test_hundred_random_feasible_programs():
    rng = np.random.default_rng(42)
    for _ in range(100):
        d = int(rng.integers(2, 31))
        m = int(rng.integers(1, d + 3))
        G = rng.normal(size=(m, d))
        z0 = rng.normal(size=d)
        h = G @ z0 + rng.uniform(0.0, 1.0, size=m)
        lo = z0 - rng.uniform(1.0, 3.0, size=d)
        hi = z0 + rng.uniform(1.0, 3.0, size=d)
        p = LinearProgram(c=rng.normal(size=d), G=G, h=h, lo=lo, hi=hi)
        sol = solve_lp(p)
        assert sol.status is LPStatus.OPTIMAL
        z = sol.primal
        assert np.all(G @ z <= h + 1e-8)
        assert np.all(z >= lo - 1e-8)
        assert np.all(z <= hi + 1e-8)
        assert sol.duality_gap <= 1e-8


def test_sparse_inequality_block():
    import scipy.sparse as sp
    G = sp.csr_matrix(np.array([[1.0, 1.0], [-1.0, 0.0]]))
    p = LinearProgram(c=np.array([1.0, 2.0]), G=G,
                      h=np.array([4.0, 0.0]), lo=np.zeros(2))
    sol = solve_lp(p)
    assert sol.status is LPStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(0.0, abs=1e-8)
