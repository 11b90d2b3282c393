"""Lower bounds on the kernel overconcentration value gammahat_s.

A lower bound >= 1/2 disproves s-goodness, so these bounds translate
into upper bounds on the largest good sparsity level. The workhorse is
a sequential convex approximation (alternating linearization): given a
point u in P_s, the LP

    x_u = argmax { u^T x : ||x||_1 <= 1, A x = 0 }

yields the value f(u) = u^T x_u, a valid lower bound, and the next
iterate is the P_s-vertex maximizing x_u^T v. The per-restart value
sequence is nondecreasing; several random restarts are merged by max.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import PsVertex, SensingMatrix, argmax_over_Ps, norm_s1
from .errors import ArgumentError, SolverFailure
from .lp import LinearProgram, LPStatus, solve_lp


@dataclass(frozen=True)
class SCAConfig:
    restarts: int = 20
    improvement_tol: float = 1e-7
    max_iters: int = 100
    rng_seed: int = 0

    def __post_init__(self):
        if self.restarts < 1 or self.improvement_tol <= 0 or self.max_iters < 1:
            raise ArgumentError("invalid SCA configuration")

    @classmethod
    def for_dimension(cls, n: int, rng_seed: int = 0) -> "SCAConfig":
        return cls(restarts=20 if n <= 64 else 10, rng_seed=rng_seed)


@dataclass(frozen=True)
class KernelWitness:
    """Certifies a lower bound: u in P_s, x in the kernel unit l1-ball,
    value = u^T x <= ||x||_{s,1} <= gammahat_s(A)."""

    u: PsVertex
    x: np.ndarray
    value: float
    residual: float

    def to_json(self) -> dict:
        return {
            "u_support": list(self.u.support),
            "u_signs": list(self.u.signs),
            "x": list(np.asarray(self.x, dtype=float)),
            "value": self.value,
            "residual": self.residual,
        }


def max_kernel_correlation(A: SensingMatrix, u):
    """Solve max { u^T x : ||x||_1 <= 1, A x = 0 }; returns (value, x)."""
    n = A.n
    u = np.asarray(u, dtype=float)
    # variables xp, xm >= 0, x = xp - xm
    c = np.concatenate([-u, u])
    E = np.hstack([A.entries, -A.entries])
    G = np.ones((1, 2 * n))
    sol = solve_lp(LinearProgram(c=c, E=E, f=np.zeros(A.k), G=G, h=[1.0],
                                 lo=np.zeros(2 * n)))
    if sol.status is not LPStatus.OPTIMAL:
        raise SolverFailure(f"kernel correlation program: {sol.status.value}")
    x = sol.primal[:n] - sol.primal[n:]
    return -float(sol.objective_value), x


def _random_vertex(n: int, s: int, rng) -> PsVertex:
    support = np.sort(rng.choice(n, size=s, replace=False))
    signs = rng.choice([-1, 1], size=s)
    return PsVertex(support=tuple(int(i) for i in support),
                    signs=tuple(int(sg) for sg in signs), s=s)


def _run_restart(A, s, u0, cfg):
    """One SCA restart from vertex u0; returns (values, witness)."""
    u = u0
    values = []
    best = None
    for _ in range(cfg.max_iters):
        uvec = u.as_vector(A.n)
        val, x = max_kernel_correlation(A, uvec)
        best = KernelWitness(u=u, x=x, value=val,
                             residual=float(np.linalg.norm(A.entries @ x)))
        if values and val - values[-1] <= cfg.improvement_tol:
            values.append(max(val, values[-1]))
            break
        values.append(val)
        u = argmax_over_Ps(x, s)
    return values, best


def sca_lower_bound(A: SensingMatrix, s: int, cfg: SCAConfig = None,
                    warm_start: PsVertex = None):
    """Best lower bound on gammahat_s(A) over several SCA restarts.

    Returns (value, witness, histories) where histories holds the
    nondecreasing per-restart value sequences. A matrix with a trivial
    kernel (k >= n) yields 0 with a zero witness.
    """
    if not 1 <= s <= A.n:
        raise ArgumentError(f"s must satisfy 1 <= s <= {A.n}, got {s}")
    if cfg is None:
        cfg = SCAConfig.for_dimension(A.n)
    if A.k >= A.n:
        u = PsVertex(support=(), signs=(), s=s)
        return 0.0, KernelWitness(u=u, x=np.zeros(A.n), value=0.0,
                                  residual=0.0), []
    rng = np.random.default_rng(cfg.rng_seed)
    starts = []
    if warm_start is not None:
        starts.append(PsVertex(support=warm_start.support,
                               signs=warm_start.signs, s=s))
    while len(starts) < cfg.restarts:
        starts.append(_random_vertex(A.n, s, rng))
    best_val, best_wit, histories = -np.inf, None, []
    for u0 in starts:
        values, wit = _run_restart(A, s, u0, cfg)
        histories.append(values)
        if wit.value > best_val:
            best_val, best_wit = wit.value, wit
    return float(best_val), best_wit, histories


@dataclass(frozen=True)
class UpperBoundResult:
    """Upper bound s_bar on the largest good sparsity level, with the
    lower-bound values that produced it. When no level up to min(k, n)
    could be disproved, ``disproof_found`` is False and s_bar is that
    cap."""

    s_bar: int
    disproof_found: bool
    lower_bounds: dict = field(default_factory=dict)
    witness: KernelWitness = None


def s_upper_bound(A: SensingMatrix, cfg: SCAConfig = None,
                  s_start: int = 1) -> UpperBoundResult:
    """Scan s upward until a lower bound >= 1/2 disproves s-goodness.

    Returns the last level before the first disproof; each level warm
    starts from the previous witness vertex alongside random restarts.
    """
    if s_start < 1:
        raise ArgumentError("s_start must be >= 1")
    if cfg is None:
        cfg = SCAConfig.for_dimension(A.n)
    cap = min(A.k, A.n)
    bounds = {}
    warm = None
    witness = None
    for s in range(s_start, cap + 1):
        val, wit, _ = sca_lower_bound(A, s, cfg, warm_start=warm)
        bounds[s] = val
        if val >= 0.5:
            return UpperBoundResult(s_bar=s - 1, disproof_found=True,
                                    lower_bounds=bounds, witness=wit)
        warm = wit.u if wit.u.support else None
        witness = wit
    return UpperBoundResult(s_bar=cap, disproof_found=False,
                            lower_bounds=bounds, witness=witness)
