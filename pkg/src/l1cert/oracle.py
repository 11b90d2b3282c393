"""Ground-truth computation of gammahat_s on tiny instances.

gammahat_s(A) = max { u^T x : u vertex of P_s, ||x||_1 <= 1, A x = 0 }
is computed exactly by enumerating the s-sparse sign vectors u (the
vertices of P_s) and solving one small LP per vertex. The +-u symmetry
of the feasible set halves the enumeration. A second, independent
formulation (kernel-basis parameterization over a sign-pattern grid) is
provided for cross-checking, plus Monte-Carlo empirical goodness
testing and the certified-implies-trivial-submatrix-kernel check.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from math import comb

import numpy as np
import scipy.linalg

from .core import PsVertex, SensingMatrix, norm_s1
from .errors import ArgumentError, ResourceLimitError
from .lower import max_kernel_correlation
from .lp import DEFAULT_GAP_TOL, LinearProgram, LPStatus, solve_lp
from .recovery import RecoveryProblem, l1_recover

DEFAULT_SIZE_GUARD = 200_000


def _guard(n, s, size_guard):
    cost = comb(n, s) * 2 ** s
    if cost > size_guard:
        raise ResourceLimitError(
            f"oracle enumeration needs {cost} vertex programs, above the "
            f"guard {size_guard}")


def gammahat_exact(A: SensingMatrix, s: int,
                   size_guard: int = DEFAULT_SIZE_GUARD) -> float:
    """Exact gammahat_s(A) by vertex enumeration (beta = infinity).

    Exact up to the LP gap tolerance. Guarded: C(n, s) * 2^s must not
    exceed ``size_guard``.
    """
    if not 1 <= s <= A.n:
        raise ArgumentError(f"s must satisfy 1 <= s <= {A.n}, got {s}")
    _guard(A.n, s, size_guard)
    if A.k >= A.n and np.linalg.matrix_rank(A.entries) == A.n:
        return 0.0
    best = 0.0
    u = np.zeros(A.n)
    for support in combinations(range(A.n), s):
        # fix the first sign to + : f(-u) = f(u) by symmetry of the ball
        for signs in product((1.0, -1.0), repeat=s - 1):
            u[:] = 0.0
            u[list(support)] = (1.0,) + signs
            val, _ = max_kernel_correlation(A, u)
            best = max(best, val)
    return best


def gammahat_exact_kernel_grid(A: SensingMatrix, s: int,
                               size_guard: int = DEFAULT_SIZE_GUARD) -> float:
    """Independent gammahat_s(A) formulation for cross-checking.

    Parameterizes the kernel by an orthonormal basis N and maximizes the
    sum of s magnitudes over each orthant cell of the unit l1-ball slice
    { c : sign-pattern fixed, ||N c||_1 <= 1 }: one LP per (sign
    pattern, support subset) pair.
    """
    if not 1 <= s <= A.n:
        raise ArgumentError(f"s must satisfy 1 <= s <= {A.n}, got {s}")
    n = A.n
    cost = comb(n, s) * 2 ** (n - 1)
    if cost > size_guard:
        raise ResourceLimitError(
            f"sign-grid oracle needs {cost} programs, above the guard "
            f"{size_guard}")
    N = scipy.linalg.null_space(A.entries)
    if N.shape[1] == 0:
        return 0.0
    d = N.shape[1]
    best = 0.0
    for sigma_rest in product((1.0, -1.0), repeat=n - 1):
        sigma = np.concatenate([[1.0], sigma_rest])
        SN = sigma[:, None] * N  # rows scaled: (sigma*x)_i = (SN c)_i
        # orthant cell: SN c >= 0 and sum(SN c) <= 1
        G = np.vstack([-SN, np.sum(SN, axis=0)[None, :]])
        h = np.concatenate([np.zeros(n), [1.0]])
        for support in combinations(range(n), s):
            c = -np.sum(SN[list(support), :], axis=0)
            sol = solve_lp(LinearProgram(c=c, G=G, h=h,
                                         lo=np.full(d, -np.inf)))
            if sol.status is LPStatus.OPTIMAL:
                best = max(best, -float(sol.objective_value))
            elif sol.status is LPStatus.UNBOUNDED:
                raise ArgumentError("sign-grid oracle: unbounded cell "
                                    "(inconsistent kernel basis)")
    return best


def s_star_exact(A: SensingMatrix, size_guard: int = DEFAULT_SIZE_GUARD,
                 gap_tol: float = DEFAULT_GAP_TOL) -> int:
    """Exact largest good sparsity level on oracle-sized instances:
    the largest s with gammahat_s(A) < 1/2 - gap_tol."""
    cap = min(A.k, A.n)
    s_star = 0
    for s in range(1, cap + 1):
        if gammahat_exact(A, s, size_guard) < 0.5 - gap_tol:
            s_star = s
        else:
            break  # gammahat is nondecreasing in s
    return s_star


@dataclass(frozen=True)
class EmpiricalGoodness:
    successes: int
    failures: int
    worst_error: float
    failing_signal: np.ndarray = None


def empirical_goodness(A: SensingMatrix, s: int, trials: int = 100,
                       rng_seed: int = 0,
                       tol: float = 1e-6) -> EmpiricalGoodness:
    """Monte-Carlo goodness test: recover random s-sparse signals from
    noiseless data and count the exact recoveries.

    A single failure disproves s-goodness (up to LP tolerance); the
    first failing signal is reported as the witness.
    """
    if trials < 1:
        raise ArgumentError("trials must be >= 1")
    if s == 0:
        return EmpiricalGoodness(successes=trials, failures=0, worst_error=0.0)
    rng = np.random.default_rng(rng_seed)
    successes = failures = 0
    worst = 0.0
    failing = None
    for _ in range(trials):
        w = np.zeros(A.n)
        support = rng.choice(A.n, size=s, replace=False)
        w[support] = rng.standard_normal(s)
        x_hat = l1_recover(RecoveryProblem(A=A, y=A.entries @ w, epsilon=0.0))
        err = float(np.abs(x_hat - w).max())
        worst = max(worst, err)
        if err <= tol:
            successes += 1
        else:
            failures += 1
            if failing is None:
                failing = w
    return EmpiricalGoodness(successes=successes, failures=failures,
                             worst_error=worst, failing_signal=failing)


def submatrix_kernel_check(A: SensingMatrix, s: int, samples: int = 200,
                           rng_seed: int = 0,
                           sigma_tol: float = 1e-8) -> bool:
    """True iff all sampled (or, when few, all) k x s submatrices have
    smallest singular value above the tolerance. A necessary condition
    for certified matrices: their k x s submatrices have trivial
    kernels."""
    if s > A.k:
        raise ArgumentError("s must be <= k for a kernel check")
    if s == 0:
        return True
    total = comb(A.n, s)
    if total <= samples:
        supports = combinations(range(A.n), s)
    else:
        rng = np.random.default_rng(rng_seed)
        supports = (tuple(np.sort(rng.choice(A.n, size=s, replace=False)))
                    for _ in range(samples))
    for support in supports:
        sigma = scipy.linalg.svdvals(A.entries[:, list(support)])
        if sigma[-1] <= sigma_tol:
            return False
    return True
