"""Efficiently computable certificates of s-goodness.

A k x n matrix is s-good when every s-sparse signal is the unique
l1-minimizer consistent with its noiseless measurements; equivalently,
the kernel overconcentration value

    gammahat_s(A, beta) = max { ||x||_{s,1} - beta ||Ax|| : ||x||_1 <= 1 }

is below 1/2. This module computes upper bounds on gammahat (hence lower
bounds on the certified sparsity level): the cheap mutual-incoherence
bound, the per-column relaxation alpha_1, the full relaxation alpha_s
with corrector matrix Y, the exact conversions between the two
characteristic scales, beta calibration, and the sqrt(k) performance
limit of the relaxation.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .core import (ObservationNorm, SensingMatrix, mutual_incoherence, norm_s1,
                   save_matrix)
from .errors import (ArgumentError, ResourceLimitError, SolverFailure,
                     UnsupportedConfigError)
from .lp import DEFAULT_GAP_TOL, LinearProgram, LPStatus, solve_lp

# Refuse full alpha_s programs beyond this many constraint nonzeros.
DEFAULT_LP_LIMIT = 200_000

CERTIFICATE_SCHEMA_VERSION = 1


@dataclass(frozen=True)
class CorrectorMatrix:
    """Columns y_1..y_n of the relaxation witness Y, with the dual-ball
    radius beta they were constrained to (under ``norm``)."""

    Y: np.ndarray
    beta: float
    norm: ObservationNorm = ObservationNorm.L2

    def __post_init__(self):
        Y = np.asarray(self.Y, dtype=float)
        object.__setattr__(self, "Y", Y)
        if np.isfinite(self.beta):
            duals = [self.norm.dual_of(Y[:, i]) for i in range(Y.shape[1])]
            if max(duals, default=0.0) > self.beta + 1e-9:
                raise ArgumentError("corrector column violates the dual-norm "
                                    "bound beta")

    def residual(self, A: SensingMatrix) -> np.ndarray:
        """The matrix I - Y^T A whose column (s,1)-norms certify bounds."""
        return np.eye(A.n) - self.Y.T @ A.entries


@dataclass(frozen=True)
class GoodnessCertificate:
    """Outcome of one certification route.

    ``s_certified`` is the largest sparsity level proved good (0 when
    nothing could be certified); ``bound_value`` the scalar bound the
    proof rested on; ``witness`` the corrector matrix (or None for the
    incoherence route); ``beta`` the dual-ball context.
    """

    kind: str                      # one of "Mu", "Alpha1", "AlphaS", "SCA"
    s_certified: int
    bound_value: float
    beta: float
    norm: ObservationNorm = ObservationNorm.L2
    witness: object = None
    feas_tol: float = 1e-8
    gap_tol: float = 1e-8

    def to_json(self, witness_file=None) -> dict:
        return {
            "schema_version": CERTIFICATE_SCHEMA_VERSION,
            "kind": self.kind,
            "s_certified": self.s_certified,
            "bound_value": self.bound_value,
            "beta": "inf" if np.isinf(self.beta) else self.beta,
            "norm": self.norm.value,
            "tolerances": {"feas_tol": self.feas_tol, "gap_tol": self.gap_tol},
            "witness_file": witness_file,
        }

    def save(self, path, witness_path=None) -> None:
        payload = self.to_json(witness_file=str(witness_path) if witness_path
                               else None)
        if witness_path is not None and isinstance(self.witness, CorrectorMatrix):
            save_matrix(witness_path, SensingMatrix(self.witness.Y))
        if witness_path is not None and hasattr(self.witness, "to_json"):
            payload["witness"] = self.witness.to_json()
        Path(path).write_text(json.dumps(payload, indent=2) + "\n")


@dataclass(frozen=True)
class GammaPair:
    """Matched values of the two characteristic scales with their beta
    contexts: gammahat = gamma/(1+gamma) at beta_gammahat =
    beta_gamma/(1+gamma)."""

    gamma: float
    gammahat: float
    beta_gamma: float
    beta_gammahat: float


def convert_gamma(gamma: float = None, gammahat: float = None,
                  beta: float = math.inf) -> GammaPair:
    """Convert between the two characteristic scales.

    Exactly one of ``gamma`` (must be < 1) or ``gammahat`` (must be
    < 1/2) is given together with its beta; the other scale and its beta
    follow from the exact conversion formulas.
    """
    if (gamma is None) == (gammahat is None):
        raise ArgumentError("give exactly one of gamma and gammahat")
    if gamma is not None:
        if not 0 <= gamma < 1:
            raise ArgumentError(f"gamma must lie in [0, 1), got {gamma}")
        return GammaPair(gamma=gamma, gammahat=gamma / (1 + gamma),
                         beta_gamma=beta, beta_gammahat=beta / (1 + gamma))
    if not 0 <= gammahat < 0.5:
        raise ArgumentError(f"gammahat must lie in [0, 1/2), got {gammahat}")
    return GammaPair(gamma=gammahat / (1 - gammahat), gammahat=gammahat,
                     beta_gamma=beta / (1 - gammahat), beta_gammahat=beta)


def s_bound_mu(A: SensingMatrix) -> GoodnessCertificate:
    """Cheapest certificate: the mutual-incoherence route.

    Certifies the largest s with s*mu/(1 - (s-1)*mu) < 1, i.e.
    s < (1+mu)/(2*mu); with orthonormal columns (mu = 0) the bound is
    vacuous and we cap at the universal bound min(k, n).
    """
    mu = mutual_incoherence(A)
    cap = min(A.k, A.n)
    if mu == 0.0:
        s = cap
    elif mu >= 1.0:
        s = 0
    else:
        s = min(cap, math.ceil((1 + mu) / (2 * mu)) - 1)
        # ceil(x)-1 is the largest integer strictly below x unless x is
        # integral, in which case it already equals x-1 as required.
    beta_a = max(np.linalg.norm(A.column(j)) / (A.column(j) @ A.column(j))
                 for j in range(A.n))  # l2 observation norm: ||.||_* = ||.||_2
    if s >= 1 and mu > 0.0:
        beta_ctx = s * beta_a * (1 + mu) / (1 - (s - 1) * mu)
    else:
        beta_ctx = beta_a
    return GoodnessCertificate(kind="Mu", s_certified=s, bound_value=mu,
                               beta=beta_ctx, norm=ObservationNorm.L2)


def _dual_ball_rows(k: int, beta: float, norm: ObservationNorm):
    """LP rows constraining ||y||_* <= beta for a single y in R^k.

    Returns (n_extra_vars, G_y, G_extra, h): the constraint block is
    G_y @ y + G_extra @ extra <= h with extra >= 0.
    """
    if np.isinf(beta):
        return 0, None, None, None
    if norm is ObservationNorm.L1:
        # dual is sup-norm: a plain box
        G_y = np.vstack([np.eye(k), -np.eye(k)])
        h = np.full(2 * k, beta)
        return 0, G_y, np.zeros((2 * k, 0)), h
    if norm is ObservationNorm.LINF:
        # dual is l1: t_i >= |y_i|, sum t <= beta
        G_y = np.vstack([np.eye(k), -np.eye(k), np.zeros((1, k))])
        G_t = np.vstack([-np.eye(k), -np.eye(k), np.ones((1, k))])
        h = np.concatenate([np.zeros(2 * k), [beta]])
        return k, G_y, G_t, h
    raise UnsupportedConfigError(
        "finite beta with the Euclidean observation norm needs conic "
        "programming and is not supported")


def _check_beta_norm(beta, norm):
    if np.isfinite(beta) and not norm.is_polyhedral:
        raise UnsupportedConfigError(
            "finite beta with the Euclidean observation norm needs conic "
            "programming and is not supported")
    if beta < 0:
        raise ArgumentError("beta must be nonnegative")


def _alpha1_row(A, i, beta, norm, gap_tol):
    """Solve min_y ||e_i - A^T y||_inf subject to ||y||_* <= beta."""
    k, n = A.k, A.n
    At = A.entries.T
    n_t, Gy, Gt, hb = _dual_ball_rows(k, beta, norm)
    d = k + 1 + n_t  # y, tau, dual-ball extras
    c = np.zeros(d)
    c[k] = 1.0
    ones = np.ones((n, 1))
    ei = np.zeros(n)
    ei[i] = 1.0
    # e_i - A^T y <= tau  and  A^T y - e_i <= tau
    G = np.block([[-At, -ones, np.zeros((n, n_t))],
                  [At, -ones, np.zeros((n, n_t))]])
    h = np.concatenate([-ei, ei])
    if Gy is not None:
        G = np.vstack([G, np.hstack([Gy, np.zeros((Gy.shape[0], 1)), Gt])])
        h = np.concatenate([h, hb])
    lo = np.full(d, -np.inf)
    lo[k + 1:] = 0.0
    sol = solve_lp(LinearProgram(c=c, G=G, h=h, lo=lo), gap_tol=gap_tol)
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"alpha1 column program {i}: {sol.status.value}")
    return float(sol.objective_value), sol.primal[:k]


def _alpha1_unbounded(A, norm, gap_tol, threads):
    """alpha_1 with no dual-ball constraint, via the kernel of A.

    With beta infinite the column programs reduce to min ||v||_inf over
    the affine slice N^T v = N^T e_i, where the columns of N span ker A.
    Each program is solved through its small dual max (Nc)_i subject to
    ||Nc||_1 <= 1, and the witness column y_i is read off the constraint
    multipliers with one least-squares solve. Much cheaper than the
    direct row programs when the kernel dimension n - rank(A) is small.
    """
    k, n = A.k, A.n
    N = scipy.linalg.null_space(A.entries)
    pinv_At = np.linalg.pinv(A.entries.T)
    d = N.shape[1]
    if d == 0:
        # injective matrix: every unit vector lies in the row space
        return 0.0, CorrectorMatrix(Y=pinv_At, beta=math.inf, norm=norm)
    Ns = sp.csr_matrix(N)
    eye = sp.identity(n, format="csr")
    zrow = sp.csr_matrix((1, d))
    onerow = sp.csr_matrix(np.ones((1, n)))
    G = sp.vstack([sp.hstack([Ns, -eye]),
                   sp.hstack([-Ns, -eye]),
                   sp.hstack([zrow, onerow])], format="csc")
    h = np.zeros(2 * n + 1)
    h[-1] = 1.0
    lo = np.concatenate([np.full(d, -np.inf), np.zeros(n)])

    def run(i):
        c = np.zeros(d + n)
        c[:d] = -N[i, :]
        sol = solve_lp(LinearProgram(c=c, G=G, h=h, lo=lo), gap_tol=gap_tol)
        if sol.status is not LPStatus.OPTIMAL:
            raise SolverFailure(f"alpha1 kernel program {i}: "
                                f"{sol.status.value}")
        mu = sol.dual_ineq
        v = -(mu[:n] - mu[n:2 * n])
        ei = np.zeros(n)
        ei[i] = 1.0
        y = pinv_At @ (ei - v)
        value = float(np.max(np.abs(ei - A.entries.T @ y)))
        if value > -sol.objective_value + 1e-6:
            # dual multipliers too loose to certify; redo directly
            return _alpha1_row(A, i, math.inf, norm, gap_tol)
        return value, y

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(n)))
    else:
        results = [run(i) for i in range(n)]
    Y = np.zeros((k, n))
    vals = np.zeros(n)
    for i, (v, y) in enumerate(results):
        vals[i] = v
        Y[:, i] = y
    return float(vals.max()), CorrectorMatrix(Y=Y, beta=math.inf, norm=norm)


def compute_alpha1(A: SensingMatrix, beta: float = math.inf,
                   norm: ObservationNorm = ObservationNorm.L2,
                   gap_tol: float = DEFAULT_GAP_TOL,
                   threads: int = 1):
    """Per-column relaxation bound alpha_1(A, beta) and its witness Y.

    Decomposes into n independent LPs of design dimension k. The value
    is exact for the s = 1 characteristic: alpha_1(A, beta) equals
    gammahat_1(A, beta) up to the LP gap tolerance.
    """
    _check_beta_norm(beta, norm)
    if math.isinf(beta) and A.n - A.k < A.k:
        # small kernel: the dual kernel-basis programs are much cheaper
        # than the direct row programs of design dimension k
        return _alpha1_unbounded(A, norm, gap_tol, threads)
    Y = np.zeros((A.k, A.n))
    vals = np.zeros(A.n)

    def run(i):
        return _alpha1_row(A, i, beta, norm, gap_tol)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(run, range(A.n)))
    else:
        results = [run(i) for i in range(A.n)]
    for i, (v, y) in enumerate(results):
        vals[i] = v
        Y[:, i] = y
    return float(vals.max()), CorrectorMatrix(Y=Y, beta=beta, norm=norm)


def improved_s_from_corrector(A: SensingMatrix, Y: CorrectorMatrix,
                              threshold: float = 0.5) -> int:
    """Largest s whose certificate the stored corrector already carries.

    Scans the column (s,1)-norms of I - Y^T A and returns the largest s
    keeping all of them strictly below the threshold 1/2; at least as
    large as what s * alpha_1 < 1/2 yields for an alpha_1 witness.
    """
    if Y.Y.shape != (A.k, A.n):
        raise ArgumentError("corrector shape does not match the matrix")
    R = np.abs(Y.residual(A))
    R.sort(axis=0)
    prefix = np.cumsum(R[::-1, :], axis=0)  # prefix[s-1, j] = (s,1)-norm of col j
    worst = prefix.max(axis=1)
    below = np.flatnonzero(worst < threshold)
    return int(below[-1] + 1) if below.size else 0


def _alphas_nnz_estimate(k: int, n: int) -> int:
    return 2 * n * n * (k + 2) + n * (n + 2)


def compute_alphas(A: SensingMatrix, s: int, beta: float = math.inf,
                   norm: ObservationNorm = ObservationNorm.L2,
                   gap_tol: float = DEFAULT_GAP_TOL,
                   lp_limit: int = DEFAULT_LP_LIMIT):
    """Full relaxation bound alpha_s(A, beta) with its witness Y.

    Minimizes the largest column (s,1)-norm of I - Y^T A over corrector
    matrices with dual-ball-bounded columns. One joint LP over all of Y:
    the (s,1)-norm constraints use the exact hinge representation
    ||v||_{s,1} = min_t { s*t + sum_j max(|v_j| - t, 0) }.
    """
    k, n = A.k, A.n
    if not 1 <= s <= n:
        raise ArgumentError(f"s must satisfy 1 <= s <= {n}, got {s}")
    _check_beta_norm(beta, norm)
    nnz = _alphas_nnz_estimate(k, n)
    if lp_limit is not None and nnz > lp_limit:
        raise ResourceLimitError(
            f"alpha_s program needs ~{nnz} constraint nonzeros, above the "
            f"limit {lp_limit}; raise lp_limit or use the alpha_1 route")

    # variables: Y (k*n, column-major), t (n), z (n*n, column-major), tau
    iY = lambda i: slice(k * i, k * (i + 1))
    oft = k * n
    ofz = oft + n
    oftau = ofz + n * n
    d = oftau + 1

    rows, cols, data, h = [], [], [], []
    r = 0
    Acols = A.entries  # k x n
    for j in range(n):
        Aj = Acols[:, j]
        for i in range(n):
            delta = 1.0 if i == j else 0.0
            zidx = ofz + j * n + i
            # (I - Y^T A)_{ij} = delta_ij - y_i . A_j
            #  delta - y_i.A_j - z_ij - t_j <= 0
            cols.extend(range(k * i, k * (i + 1)))
            data.extend(-Aj)
            cols.extend([zidx, oft + j])
            data.extend([-1.0, -1.0])
            rows.extend([r] * (k + 2))
            h.append(-delta)
            r += 1
            # -(delta - y_i.A_j) - z_ij - t_j <= 0
            cols.extend(range(k * i, k * (i + 1)))
            data.extend(Aj)
            cols.extend([zidx, oft + j])
            data.extend([-1.0, -1.0])
            rows.extend([r] * (k + 2))
            h.append(delta)
            r += 1
        # s*t_j + sum_i z_ij - tau <= 0
        cols.append(oft + j)
        data.append(float(s))
        cols.extend(range(ofz + j * n, ofz + (j + 1) * n))
        data.extend([1.0] * n)
        cols.append(oftau)
        data.append(-1.0)
        rows.extend([r] * (n + 2))
        h.append(0.0)
        r += 1

    lo = np.full(d, -np.inf)
    lo[oft:oftau] = 0.0  # t, z >= 0
    hi = np.full(d, np.inf)

    extra_rows = []
    if np.isfinite(beta):
        if norm is ObservationNorm.L1:      # box on each y entry
            lo[:k * n] = -beta
            hi[:k * n] = beta
        else:                               # LINF: l1-ball via extra vars
            # append u (k*n) with u >= |y|, sum_i u_{.,i} <= beta per column
            ofu = d
            d += k * n
            lo = np.concatenate([lo, np.zeros(k * n)])
            hi = np.concatenate([hi, np.full(k * n, np.inf)])
            for i in range(n):
                for t_ in range(k):
                    yv, uv = k * i + t_, ofu + k * i + t_
                    extra_rows.append(([yv, uv], [1.0, -1.0], 0.0))
                    extra_rows.append(([yv, uv], [-1.0, -1.0], 0.0))
                extra_rows.append((list(range(ofu + k * i, ofu + k * (i + 1))),
                                   [1.0] * k, beta))
    for cidx, cdat, rhs in extra_rows:
        rows.extend([r] * len(cidx))
        cols.extend(cidx)
        data.extend(cdat)
        h.append(rhs)
        r += 1

    G = sp.csr_matrix((data, (rows, cols)), shape=(r, d))
    c = np.zeros(d)
    c[oftau] = 1.0
    sol = solve_lp(LinearProgram(c=c, G=G, h=np.asarray(h), lo=lo, hi=hi),
                   gap_tol=gap_tol)
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"alpha_s program: {sol.status.value}")
    Y = sol.primal[:k * n].reshape((n, k)).T.copy()
    return float(sol.objective_value), CorrectorMatrix(Y=Y, beta=beta, norm=norm)


def s_bound_alphas(A: SensingMatrix, beta: float = math.inf,
                   norm: ObservationNorm = ObservationNorm.L2,
                   gap_tol: float = DEFAULT_GAP_TOL,
                   lp_limit: int = DEFAULT_LP_LIMIT,
                   threads: int = 1) -> GoodnessCertificate:
    """Incremental certification via the full relaxation.

    Starts from the level the alpha_1 witness already certifies and
    keeps solving the full alpha_s program for the next level while the
    bound stays below 1/2; each new witness may certify several levels
    at once. Resource refusals propagate with the best certificate
    found so far attached.
    """
    alpha1, Y1 = compute_alpha1(A, beta=beta, norm=norm, gap_tol=gap_tol,
                                threads=threads)
    s_cert = improved_s_from_corrector(A, Y1)
    best_value, best_Y = alpha1, Y1
    cap = min(A.k, A.n)
    s_next = s_cert + 1
    while s_next <= cap:
        try:
            val, Y = compute_alphas(A, s_next, beta=beta, norm=norm,
                                    gap_tol=gap_tol, lp_limit=lp_limit)
        except ResourceLimitError as err:
            err.partial = GoodnessCertificate(
                kind="AlphaS", s_certified=s_cert, bound_value=best_value,
                beta=beta, norm=norm, witness=best_Y, gap_tol=gap_tol)
            raise
        if val >= 0.5:
            break
        s_cert = max(s_next, improved_s_from_corrector(A, Y))
        best_value, best_Y = val, Y
        s_next = s_cert + 1
    return GoodnessCertificate(kind="AlphaS", s_certified=s_cert,
                               bound_value=best_value, beta=beta, norm=norm,
                               witness=best_Y, gap_tol=gap_tol)


class PerformanceLimit(NamedTuple):
    value: float
    applicable: bool


def performance_limit(k: int, n: int, s: int) -> PerformanceLimit:
    """Unavoidable floor of the relaxation bound for wide matrices.

    For n >= 32k, alpha_s(A, beta) >= min[3s / (4(s + sqrt(2k))), 1/2]
    for every A and beta; when n < 32k the floor does not apply and we
    return 0 with the inapplicable flag.
    """
    if n < 32 * k:
        return PerformanceLimit(0.0, False)
    return PerformanceLimit(min(3 * s / (4 * (s + math.sqrt(2 * k))), 0.5), True)


def _nonsingular_submatrix_sigma_min(A: SensingMatrix) -> float:
    """Smallest singular value of a greedily chosen k x k submatrix
    (QR column pivoting picks well-conditioned columns cheaply)."""
    _, _, piv = scipy.linalg.qr(A.entries, pivoting=True)
    sub = A.entries[:, piv[:A.k]]
    sigma = scipy.linalg.svdvals(sub)
    if sigma[-1] <= 1e-12:
        raise ArgumentError("matrix has no well-conditioned k x k submatrix "
                            "(rank deficient)")
    return float(sigma[-1])


def _image_ball_radius(A: SensingMatrix, gap_tol: float = DEFAULT_GAP_TOL) -> float:
    """Largest rho with the l1-ball of radius rho contained in the image
    of the unit l1-ball: solved by k LPs, rho_i = max rho s.t. some x
    with ||x||_1 <= 1 maps onto rho * e_i."""
    k, n = A.k, A.n
    rhos = []
    for i in range(k):
        # variables: xp (n), xm (n), rho
        c = np.zeros(2 * n + 1)
        c[-1] = -1.0
        E = np.hstack([A.entries, -A.entries,
                       -np.eye(k)[:, [i]]])
        f = np.zeros(k)
        G = np.concatenate([np.ones(2 * n), [0.0]])[None, :]
        lo = np.zeros(2 * n + 1)
        sol = solve_lp(LinearProgram(c=c, E=E, f=f, G=G, h=[1.0], lo=lo),
                       gap_tol=gap_tol)
        if sol.status is not LPStatus.OPTIMAL:
            raise SolverFailure(f"image-ball program {i}: {sol.status.value}")
        rhos.append(-sol.objective_value)
    rho = min(rhos)
    if rho <= 1e-12:
        raise ArgumentError("image of the unit l1-ball is degenerate "
                            "(rho <= 0); matrix not of full row rank")
    return float(rho)


def beta_sufficient_for_alpha(A: SensingMatrix,
                              norm: ObservationNorm = ObservationNorm.L2) -> float:
    """A finite beta guaranteeing alpha_s(A, beta) = alpha_s(A) whenever
    alpha_s(A) < 1/2.

    Euclidean norm: (3/2) * sqrt(k) / sigma_min of a nonsingular k x k
    submatrix. l1 norm: 3 / (2 * rho) with rho the image-ball radius.
    """
    if np.linalg.matrix_rank(A.entries) < A.k:
        raise ArgumentError("matrix must have full row rank k")
    if norm is ObservationNorm.L2:
        return 1.5 * math.sqrt(A.k) / _nonsingular_submatrix_sigma_min(A)
    if norm is ObservationNorm.L1:
        return 1.5 / _image_ball_radius(A)
    raise UnsupportedConfigError("beta calibration is provided for the "
                                 "Euclidean and l1 observation norms only")
