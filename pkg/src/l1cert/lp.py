"""Linear-program solving used by every certification routine.

Problems are stated as

    minimize    c^T z
    subject to  E z  = f
                G z <= h
                lo <= z <= hi

and answered with primal and dual solutions plus a duality-gap report.
The numerical work is delegated to the HiGHS solvers behind
``scipy.optimize.linprog``; HiGHS is deterministic for fixed input, so
identical programs yield identical answers. Infeasible and unbounded
statuses come back with a certificate ray obtained from an auxiliary LP
(a Farkas dual ray, or a primal ray of unbounded descent).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import ArgumentError, SolverFailure

DEFAULT_FEAS_TOL = 1e-8
DEFAULT_GAP_TOL = 1e-8
# Simplex/barrier iteration cap for the HiGHS backend.
DEFAULT_ITER_LIMIT = 200_000


class LPStatus(Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    ITERATION_LIMIT = "IterationLimit"


def _as_matrix(M, name):
    if M is None:
        return None
    if sp.issparse(M):
        return M.tocsr()
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ArgumentError(f"{name} must be 2-D")
    return M


@dataclass(frozen=True)
class LinearProgram:
    """Standard-form LP data. Any of the blocks may be omitted.

    Large certification programs pass ``E``/``G`` as scipy sparse
    matrices; small ones as dense arrays.
    """

    c: np.ndarray
    E: object = None
    f: np.ndarray = None
    G: object = None
    h: np.ndarray = None
    lo: np.ndarray = None
    hi: np.ndarray = None
    d: int = field(init=False)

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.c, dtype=float))
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", c.size)
        E = _as_matrix(self.E, "E")
        G = _as_matrix(self.G, "G")
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "G", G)
        for M, v, mname, vname in ((E, self.f, "E", "f"), (G, self.h, "G", "h")):
            if (M is None) != (v is None):
                raise ArgumentError(f"{mname} and {vname} must be given together")
            if M is not None:
                v = np.atleast_1d(np.asarray(v, dtype=float))
                object.__setattr__(self, vname, v)
                if M.shape != (v.size, self.d):
                    raise ArgumentError(
                        f"{mname} has shape {M.shape}, expected ({v.size}, {self.d})")
        if E is None and G is None and self.lo is None and self.hi is None:
            raise ArgumentError("program has no constraints at all")
        lo = np.full(self.d, -np.inf) if self.lo is None else \
            np.broadcast_to(np.asarray(self.lo, dtype=float), (self.d,)).copy()
        hi = np.full(self.d, np.inf) if self.hi is None else \
            np.broadcast_to(np.asarray(self.hi, dtype=float), (self.d,)).copy()
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)


@dataclass(frozen=True)
class LPSolution:
    status: LPStatus
    primal: np.ndarray = None
    dual_eq: np.ndarray = None
    dual_ineq: np.ndarray = None
    objective_value: float = np.nan
    duality_gap: float = np.nan


def _bounds(p):
    return np.column_stack([p.lo, p.hi])


def _run(c, p, iter_limit, feas_tol):
    return linprog(
        c,
        A_ub=p.G, b_ub=p.h, A_eq=p.E, b_eq=p.f,
        bounds=_bounds(p), method="highs",
        options={
            "maxiter": iter_limit,
            "presolve": True,
            "primal_feasibility_tolerance": feas_tol,
            "dual_feasibility_tolerance": feas_tol,
        },
    )


def _infeasibility_ray(p, iter_limit, feas_tol):
    """Farkas-type certificate of primal infeasibility.

    Searches for multipliers (y on Ez=f, mu >= 0 on Gz<=h, box
    multipliers on finite bounds) whose aggregated constraint is
    0 <= (negative number). Returns (y, mu) or (None, None).
    """
    n_eq = 0 if p.E is None else p.f.size
    n_ub = 0 if p.G is None else p.h.size
    d = p.d
    blocks = []
    if p.E is not None:
        blocks.append(p.E.T if not sp.issparse(p.E) else p.E.T.tocsr())
    if p.G is not None:
        blocks.append(p.G.T if not sp.issparse(p.G) else p.G.T.tocsr())
    blocks.append(sp.identity(d, format="csr"))
    blocks.append(-sp.identity(d, format="csr"))
    Aeq = sp.hstack([sp.csr_matrix(np.atleast_2d(b)) if np.ndim(b) < 2 else
                     sp.csr_matrix(b) for b in blocks], format="csr")
    hi_fin = np.where(np.isfinite(p.hi), p.hi, 0.0)
    lo_fin = np.where(np.isfinite(p.lo), p.lo, 0.0)
    cost = np.concatenate([
        p.f if p.E is not None else np.empty(0),
        p.h if p.G is not None else np.empty(0),
        hi_fin, -lo_fin])
    bounds = (
        [(-1.0, 1.0)] * n_eq
        + [(0.0, 1.0)] * n_ub
        + [(0.0, 1.0) if np.isfinite(b) else (0.0, 0.0) for b in p.hi]
        + [(0.0, 1.0) if np.isfinite(b) else (0.0, 0.0) for b in p.lo]
    )
    res = linprog(cost, A_eq=Aeq, b_eq=np.zeros(d), bounds=bounds,
                  method="highs", options={"maxiter": iter_limit})
    if res.status == 0 and res.fun < -10 * feas_tol:
        y = res.x[:n_eq] if n_eq else np.empty(0)
        mu = res.x[n_eq:n_eq + n_ub] if n_ub else np.empty(0)
        return y, mu
    return None, None


def _unbounded_ray(p, iter_limit, feas_tol):
    """Ray of unbounded descent: c^T d < 0 with E d = 0, G d <= 0 and d
    pointing away from every finite bound."""
    lo_dir = np.where(np.isfinite(p.lo), 0.0, -1.0)
    hi_dir = np.where(np.isfinite(p.hi), 0.0, 1.0)
    res = linprog(
        p.c,
        A_ub=p.G, b_ub=None if p.G is None else np.zeros(p.h.size),
        A_eq=p.E, b_eq=None if p.E is None else np.zeros(p.f.size),
        bounds=np.column_stack([lo_dir, hi_dir]),
        method="highs", options={"maxiter": iter_limit})
    if res.status == 0 and res.fun < -10 * feas_tol:
        return res.x
    return None


def solve_lp(p: LinearProgram,
             feas_tol: float = DEFAULT_FEAS_TOL,
             gap_tol: float = DEFAULT_GAP_TOL,
             iter_limit: int = DEFAULT_ITER_LIMIT) -> LPSolution:
    """Solve a standard-form LP and report primal/dual answers.

    On an Optimal status the primal feasibility residual is within
    ``feas_tol`` and the primal-dual objective gap within ``gap_tol``.
    Infeasible/Unbounded statuses carry a certificate ray in the
    dual/primal slots respectively. Numerical breakdown is reported as
    IterationLimit, never as a silent wrong answer.
    """
    if feas_tol <= 0 or gap_tol <= 0:
        raise ArgumentError("tolerances must be positive")
    res = _run(p.c, p, iter_limit, feas_tol)
    if res.status == 0:
        dual_eq = res.eqlin.marginals if p.E is not None else np.empty(0)
        dual_ineq = res.ineqlin.marginals if p.G is not None else np.empty(0)
        lo_fin = np.isfinite(p.lo)
        hi_fin = np.isfinite(p.hi)
        lo_term = float(p.lo[lo_fin] @ res.lower.marginals[lo_fin])
        hi_term = float(p.hi[hi_fin] @ res.upper.marginals[hi_fin])
        dual_obj = lo_term + hi_term
        if p.E is not None:
            dual_obj += float(p.f @ dual_eq)
        if p.G is not None:
            dual_obj += float(p.h @ dual_ineq)
        gap = abs(float(res.fun) - dual_obj)
        if gap > max(gap_tol, gap_tol * max(1.0, abs(res.fun))):
            return LPSolution(status=LPStatus.ITERATION_LIMIT, primal=res.x,
                              objective_value=float(res.fun), duality_gap=gap)
        return LPSolution(status=LPStatus.OPTIMAL, primal=res.x,
                          dual_eq=np.asarray(dual_eq, dtype=float),
                          dual_ineq=np.asarray(dual_ineq, dtype=float),
                          objective_value=float(res.fun), duality_gap=gap)
    if res.status == 2:
        y, mu = _infeasibility_ray(p, iter_limit, feas_tol)
        return LPSolution(status=LPStatus.INFEASIBLE, dual_eq=y, dual_ineq=mu)
    if res.status == 3:
        ray = _unbounded_ray(p, iter_limit, feas_tol)
        return LPSolution(status=LPStatus.UNBOUNDED, primal=ray,
                          objective_value=-np.inf)
    if res.status in (1, 4):
        return LPSolution(status=LPStatus.ITERATION_LIMIT)
    raise SolverFailure(f"unexpected LP backend status {res.status}: {res.message}")
