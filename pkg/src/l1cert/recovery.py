"""l1-recovery solvers, error-bound calculators, and the weighted
scaling search.

Noiseless recovery (epsilon = 0) is an equality-constrained LP valid for
any observation norm; noisy recovery is supported for the polyhedral
observation norms. The error bounds follow the standard pattern: with
gammahat = gammahat_s(A, beta) < 1/2,

    ||x - w||_1 <= (1 - 2*gammahat)^-1 [2*beta*(upsilon + eps)
                                        + 2*||w - w^s||_1 + nu]

for any (upsilon, nu)-optimal solution x of the recovery program.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .bounds import (CorrectorMatrix, _check_beta_norm, _dual_ball_rows,
                     _image_ball_radius, _nonsingular_submatrix_sigma_min,
                     compute_alphas)
from .core import ObservationNorm, SensingMatrix, hard_threshold, norm_s1
from .errors import ArgumentError, SolverFailure, UnsupportedConfigError
from .lp import DEFAULT_GAP_TOL, LinearProgram, LPStatus, solve_lp


@dataclass(frozen=True)
class RecoveryProblem:
    A: SensingMatrix
    y: np.ndarray
    epsilon: float = 0.0
    norm: ObservationNorm = ObservationNorm.L2

    def __post_init__(self):
        y = np.asarray(self.y, dtype=float).ravel()
        object.__setattr__(self, "y", y)
        if y.size != self.A.k:
            raise ArgumentError(f"observation has dimension {y.size}, "
                                f"expected {self.A.k}")
        if self.epsilon < 0:
            raise ArgumentError("epsilon must be nonnegative")
        if self.epsilon > 0 and not self.norm.is_polyhedral:
            raise UnsupportedConfigError(
                "noisy recovery under the Euclidean observation norm is not "
                "supported; use epsilon=0 or a polyhedral norm")


class InfeasibleRecoveryError(ArgumentError):
    """The recovery program has no feasible point (epsilon too small)."""


def l1_recover(p: RecoveryProblem, gap_tol: float = DEFAULT_GAP_TOL) -> np.ndarray:
    """Minimize ||x||_1 subject to ||A x - y|| <= epsilon."""
    A, y, eps = p.A, p.y, p.epsilon
    k, n = A.k, A.n
    if eps == 0.0:
        c = np.ones(2 * n)
        E = np.hstack([A.entries, -A.entries])
        sol = solve_lp(LinearProgram(c=c, E=E, f=y, lo=np.zeros(2 * n)),
                       gap_tol=gap_tol)
    elif p.norm is ObservationNorm.LINF:
        # -eps <= A x - y <= eps
        c = np.ones(2 * n)
        Ad = np.hstack([A.entries, -A.entries])
        G = np.vstack([Ad, -Ad])
        h = np.concatenate([y + eps, eps - y])
        sol = solve_lp(LinearProgram(c=c, G=G, h=h, lo=np.zeros(2 * n)),
                       gap_tol=gap_tol)
    else:  # L1: r >= |A x - y|, sum r <= eps
        c = np.concatenate([np.ones(2 * n), np.zeros(k)])
        Ad = np.hstack([A.entries, -A.entries])
        Ik = np.eye(k)
        G = np.vstack([
            np.hstack([Ad, -Ik]),
            np.hstack([-Ad, -Ik]),
            np.concatenate([np.zeros(2 * n), np.ones(k)])[None, :],
        ])
        h = np.concatenate([y, -y, [eps]])
        sol = solve_lp(LinearProgram(c=c, G=G, h=h,
                                     lo=np.zeros(2 * n + k)), gap_tol=gap_tol)
    if sol.status is LPStatus.INFEASIBLE:
        raise InfeasibleRecoveryError(
            "recovery program infeasible: epsilon too small for the given "
            "observation")
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"recovery program: {sol.status.value}")
    return sol.primal[:n] - sol.primal[n:2 * n]


def noiseless_error_bound(gammahat: float, nu: float, tail: float) -> float:
    """l1 error bound for a nu-optimal solution of the noiseless
    program: (nu + 2*tail) / (1 - 2*gammahat)."""
    if not 0 <= gammahat < 0.5:
        raise ArgumentError(f"gammahat must lie in [0, 1/2), got {gammahat}")
    if nu < 0 or tail < 0:
        raise ArgumentError("nu and tail must be nonnegative")
    return (nu + 2.0 * tail) / (1.0 - 2.0 * gammahat)


@dataclass(frozen=True)
class ErrorBoundInputs:
    gammahat: float
    beta: float
    epsilon: float = 0.0
    upsilon: float = 0.0
    nu: float = 0.0
    tail: float = 0.0

    def __post_init__(self):
        if not 0 <= self.gammahat < 0.5:
            raise ArgumentError(f"gammahat must lie in [0, 1/2), got "
                                f"{self.gammahat}")
        if not np.isfinite(self.beta) or self.beta < 0:
            raise ArgumentError("beta must be finite and nonnegative")
        for name in ("epsilon", "upsilon", "nu", "tail"):
            if getattr(self, name) < 0:
                raise ArgumentError(f"{name} must be nonnegative")


def noisy_error_bound(inp: ErrorBoundInputs) -> float:
    """l1 error bound for a (upsilon, nu)-optimal noisy recovery:
    (1 - 2*gammahat)^-1 [2*beta*(upsilon + epsilon) + 2*tail + nu]."""
    return (2.0 * inp.beta * (inp.upsilon + inp.epsilon)
            + 2.0 * inp.tail + inp.nu) / (1.0 - 2.0 * inp.gammahat)


def beta_sufficient_for_gamma(A: SensingMatrix,
                              norm: ObservationNorm = ObservationNorm.L2) -> float:
    """A finite beta at which the exact characteristic saturates:
    gamma_s(A, beta) = gamma_s(A) whenever gamma_s(A) < 1.

    Euclidean norm: sqrt(k) / sigma_min of a nonsingular k x k
    submatrix; l1 norm: 1 / rho with rho the image-ball radius. Same
    construction as the alpha calibration, without the 3/2 factor.
    """
    if np.linalg.matrix_rank(A.entries) < A.k:
        raise ArgumentError("matrix must have full row rank k")
    if norm is ObservationNorm.L2:
        return math.sqrt(A.k) / _nonsingular_submatrix_sigma_min(A)
    if norm is ObservationNorm.L1:
        return 1.0 / _image_ball_radius(A)
    raise UnsupportedConfigError("beta calibration is provided for the "
                                 "Euclidean and l1 observation norms only")


@dataclass(frozen=True)
class ScalingResult:
    lambdas: np.ndarray
    Y: CorrectorMatrix
    achieved: float
    feasible: bool


def _scaling_feasibility(A, s, beta_bar, norm, ell, target, gap_tol):
    """Feasibility LP behind the weighted scaling search.

    Find lambda in [ell, 1]^n and Y with dual-ball-bounded columns such
    that ||lambda_i e_i - Y^T A_i||_{s,1} <= target * lambda_i for all i.
    """
    k, n = A.k, A.n
    # variables: Y (k*n col-major), lambda (n), t (n), z (n*n col-major)
    oflam = k * n
    oft = oflam + n
    ofz = oft + n
    d = ofz + n * n
    rows, cols, data, h = [], [], [], []
    r = 0
    for i in range(n):
        Ai = A.entries[:, i]
        for j in range(n):
            # v_ji = lambda_i * delta_ji - y_j . A_i
            delta = 1.0 if j == i else 0.0
            zidx = ofz + i * n + j
            for sgn in (1.0, -1.0):
                # sgn * v_ji - z_ji - t_i <= 0
                cols.extend(range(k * j, k * (j + 1)))
                data.extend(-sgn * Ai)
                cols.extend([oflam + i, zidx, oft + i])
                data.extend([sgn * delta, -1.0, -1.0])
                rows.extend([r] * (k + 3))
                h.append(0.0)
                r += 1
        # s*t_i + sum_j z_ji - target*lambda_i <= 0
        cols.append(oft + i)
        data.append(float(s))
        cols.extend(range(ofz + i * n, ofz + (i + 1) * n))
        data.extend([1.0] * n)
        cols.append(oflam + i)
        data.append(-target)
        rows.extend([r] * (n + 2))
        h.append(0.0)
        r += 1

    lo = np.full(d, -np.inf)
    hi = np.full(d, np.inf)
    lo[oflam:oft] = ell
    hi[oflam:oft] = 1.0
    lo[oft:] = 0.0

    if np.isfinite(beta_bar):
        if norm is ObservationNorm.L1:
            lo[:k * n] = -beta_bar
            hi[:k * n] = beta_bar
        elif norm is ObservationNorm.LINF:
            ofu = d
            d += k * n
            lo = np.concatenate([lo, np.zeros(k * n)])
            hi = np.concatenate([hi, np.full(k * n, np.inf)])
            for i in range(n):
                for t_ in range(k):
                    yv, uv = k * i + t_, ofu + k * i + t_
                    for pair in (([yv, uv], [1.0, -1.0]),
                                 ([yv, uv], [-1.0, -1.0])):
                        cols.extend(pair[0])
                        data.extend(pair[1])
                        rows.extend([r] * 2)
                        h.append(0.0)
                        r += 1
                cols.extend(range(ofu + k * i, ofu + k * (i + 1)))
                data.extend([1.0] * k)
                rows.extend([r] * k)
                h.append(beta_bar)
                r += 1
        else:
            raise UnsupportedConfigError(
                "finite beta with the Euclidean observation norm is not "
                "supported")

    G = sp.csr_matrix((data, (rows, cols)), shape=(r, d))
    c = np.zeros(d)  # pure feasibility
    sol = solve_lp(LinearProgram(c=c, G=G, h=np.asarray(h), lo=lo, hi=hi),
                   gap_tol=gap_tol)
    if sol.status is LPStatus.INFEASIBLE:
        return None
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"scaling feasibility program: {sol.status.value}")
    Y = sol.primal[:k * n].reshape((n, k)).T.copy()
    lambdas = sol.primal[oflam:oft].copy()
    return lambdas, Y


def weighted_scaling_feasibility(A: SensingMatrix, s: int,
                                 beta_bar: float = math.inf,
                                 ell: float = 0.1,
                                 gammahat_target: float = 0.45,
                                 norm: ObservationNorm = ObservationNorm.L2,
                                 gap_tol: float = DEFAULT_GAP_TOL) -> ScalingResult:
    """Search for column weights that certify the target bound level.

    Feasible output means the reweighted matrix A * diag(lambda)^-1 has
    alpha_s(., beta_bar) <= gammahat_target.
    """
    if not 0 < ell <= 1:
        raise ArgumentError("ell must lie in (0, 1]")
    if not 0 < gammahat_target < 0.5:
        raise ArgumentError("gammahat_target must lie in (0, 1/2)")
    _check_beta_norm(beta_bar, norm)
    out = _scaling_feasibility(A, s, beta_bar, norm, ell, gammahat_target,
                               gap_tol)
    if out is None:
        return ScalingResult(lambdas=np.ones(A.n),
                             Y=CorrectorMatrix(np.zeros((A.k, A.n)), beta_bar,
                                               norm),
                             achieved=math.nan, feasible=False)
    lambdas, Y = out
    return ScalingResult(lambdas=lambdas,
                         Y=CorrectorMatrix(Y, beta_bar, norm),
                         achieved=gammahat_target, feasible=True)


def weighted_scaling_optimize(A: SensingMatrix, s: int,
                              beta_bar: float = math.inf,
                              ell: float = 0.1,
                              norm: ObservationNorm = ObservationNorm.L2,
                              bisect_tol: float = 1e-3,
                              gap_tol: float = DEFAULT_GAP_TOL) -> ScalingResult:
    """Minimize the certified bound level over column weights by
    bisection; returns the result at the smallest feasible level within
    ``bisect_tol``. (target = 1 is always feasible via Y = 0.)"""
    if not 0 < ell <= 1:
        raise ArgumentError("ell must lie in (0, 1]")
    _check_beta_norm(beta_bar, norm)
    lo_t, hi_t = 0.0, 1.0
    best = _scaling_feasibility(A, s, beta_bar, norm, ell, hi_t, gap_tol)
    if best is None:
        raise SolverFailure("scaling bisection: target 1 reported infeasible")
    while hi_t - lo_t > bisect_tol:
        mid = 0.5 * (lo_t + hi_t)
        out = _scaling_feasibility(A, s, beta_bar, norm, ell, mid, gap_tol)
        if out is None:
            lo_t = mid
        else:
            hi_t = mid
            best = out
    lambdas, Y = best
    return ScalingResult(lambdas=lambdas,
                         Y=CorrectorMatrix(Y, beta_bar, norm),
                         achieved=hi_t, feasible=True)


@dataclass(frozen=True)
class RIPImpliedBounds:
    gammahat_bound: float
    gamma_bound: float
    beta_bound: float
    alpha1_bound: float = None


def rip_implied_bounds(delta: float, s: int, m: int = None) -> RIPImpliedBounds:
    """Formula evaluation of the bounds a restricted-isometry constant
    implies; no attempt is made to verify the property itself.

    For RI(delta, 2s) with delta < sqrt(2) - 1:
    gammahat <= sqrt(2)*delta / (1 + (sqrt(2)-1)*delta), gamma <=
    sqrt(2)*delta / (1 - delta), saturating beta >= sqrt((1+delta)*s) /
    (1 + (sqrt(2)-1)*delta). With RI(delta, m), m >= 2: alpha_1 <=
    sqrt(2)*delta / ((1-delta)*sqrt(m-1)).
    """
    r2 = math.sqrt(2.0)
    if not 0 < delta < r2 - 1:
        raise ArgumentError(f"delta must lie in (0, sqrt(2)-1), got {delta}")
    if s < 1:
        raise ArgumentError("s must be >= 1")
    alpha1 = None
    if m is not None:
        if m < 2:
            raise ArgumentError("m must be >= 2 for the alpha_1 formula")
        alpha1 = r2 * delta / ((1 - delta) * math.sqrt(m - 1))
    return RIPImpliedBounds(
        gammahat_bound=r2 * delta / (1 + (r2 - 1) * delta),
        gamma_bound=r2 * delta / (1 - delta),
        beta_bound=math.sqrt((1 + delta) * s) / (1 + (r2 - 1) * delta),
        alpha1_bound=alpha1,
    )


@dataclass(frozen=True)
class REImpliedBounds:
    gammahat_bound: float
    beta: float
    certifying: bool


def re_implied_bounds(s: int, rho: float, kappa: float) -> REImpliedBounds:
    """Restricted-eigenvalue implication: RE(s, rho, kappa) gives
    gammahat_s(A, sqrt(s)/kappa) <= 1/(1+rho); certifying only when
    rho > 1 (bound strictly below 1/2)."""
    if kappa <= 0:
        raise ArgumentError("kappa must be positive")
    if s < 1:
        raise ArgumentError("s must be >= 1")
    if rho < 0:
        raise ArgumentError("rho must be nonnegative")
    return REImpliedBounds(gammahat_bound=1.0 / (1.0 + rho),
                           beta=math.sqrt(s) / kappa,
                           certifying=rho > 1.0)


@dataclass(frozen=True)
class RecoveryReport:
    x_hat: np.ndarray
    l1_error: float = None
    linf_error: float = None
    bound_used: str = None
    bound_value: float = None
    held: bool = None
    seeds: dict = None

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "x_hat": list(np.asarray(self.x_hat, dtype=float)),
            "l1_error": self.l1_error,
            "linf_error": self.linf_error,
            "bound_used": self.bound_used,
            "bound_value": self.bound_value,
            "held": self.held,
            "seeds": self.seeds or {},
        }


def simulate_suboptimal_recovery(p: RecoveryProblem, upsilon: float,
                                 nu: float, rng) -> np.ndarray:
    """Produce a (upsilon, nu)-optimal solution of the recovery program.

    Solves to optimality, then perturbs along a random direction while
    keeping the residual within upsilon and the objective within nu of
    optimal, so the error-bound contract is exercised away from exact
    optima.
    """
    if upsilon < p.epsilon:
        raise ArgumentError("upsilon must be >= epsilon for perturbation")
    x_star = l1_recover(p)
    g = rng.standard_normal(p.A.n)
    res_slack = upsilon - p.norm.of(p.A.entries @ x_star - p.y)
    Ag = p.norm.of(p.A.entries @ g)
    t_res = res_slack / Ag if Ag > 0 else math.inf
    g1 = float(np.abs(g).sum())
    t_obj = nu / g1 if g1 > 0 else math.inf
    t = min(t_res, t_obj)
    if not np.isfinite(t):
        t = 0.0
    return x_star + rng.uniform(0.5, 1.0) * t * g
