"""Core vector/matrix types and norm machinery.

Everything here is a pure function of immutable inputs: sensing matrices,
observation norms, the ``(s,1)``-norm (sum of the s largest magnitudes),
the polytope P_s = {u : ||u||_1 <= s, ||u||_inf <= 1} and closed-form
linear optimization over it.

The shared matrix text format is: first line "k n", then k whitespace
separated rows of n decimal floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import ArgumentError

# Absolute tolerance for algebraic identities on unit-normalized data.
DEFAULT_TOL = 1e-9

# Column norms of a matrix flagged as normalized must match 1 this tightly.
NORMALIZATION_TOL = 1e-12


class ObservationNorm(Enum):
    """Norm used on the observation space R^k."""

    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @property
    def dual(self) -> "ObservationNorm":
        return _DUALS[self]

    def of(self, v) -> float:
        """Evaluate the norm of a vector."""
        v = np.asarray(v, dtype=float)
        if self is ObservationNorm.L1:
            return float(np.abs(v).sum())
        if self is ObservationNorm.L2:
            return float(np.linalg.norm(v))
        return float(np.abs(v).max()) if v.size else 0.0

    def dual_of(self, v) -> float:
        """Evaluate the conjugate norm of a vector."""
        return self.dual.of(v)

    @property
    def is_polyhedral(self) -> bool:
        return self is not ObservationNorm.L2

    @classmethod
    def parse(cls, name: str) -> "ObservationNorm":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ArgumentError(f"unknown observation norm {name!r}") from None


_DUALS = {
    ObservationNorm.L1: ObservationNorm.LINF,
    ObservationNorm.LINF: ObservationNorm.L1,
    ObservationNorm.L2: ObservationNorm.L2,
}


@dataclass(frozen=True)
class SensingMatrix:
    """Dense real k x n sensing matrix with provenance metadata."""

    entries: np.ndarray
    column_normalized: bool = False
    seed: int | None = None
    k: int = field(init=False)
    n: int = field(init=False)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
            raise ArgumentError("sensing matrix must be a 2-D array with k, n >= 1")
        if not np.all(np.isfinite(a)):
            raise ArgumentError("sensing matrix entries must be finite")
        a = np.ascontiguousarray(a)
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "k", a.shape[0])
        object.__setattr__(self, "n", a.shape[1])
        if self.column_normalized:
            norms = np.linalg.norm(a, axis=0)
            if np.any(np.abs(norms - 1.0) > NORMALIZATION_TOL):
                raise ArgumentError("matrix flagged column_normalized has a column "
                                    "with l2-norm != 1")

    def column(self, j: int) -> np.ndarray:
        return self.entries[:, j]

    def normalized(self) -> "SensingMatrix":
        """Return a copy with every column divided by its l2-norm."""
        norms = np.linalg.norm(self.entries, axis=0)
        if np.any(norms == 0.0):
            j = int(np.flatnonzero(norms == 0.0)[0])
            raise ArgumentError(f"cannot normalize: column {j} is zero")
        return SensingMatrix(self.entries / norms, column_normalized=True,
                             seed=self.seed)


@dataclass(frozen=True)
class PsVertex:
    """A vertex of P_s: an s-sparse sign vector.

    ``support`` holds the (sorted) indices of the nonzero entries and
    ``signs`` the corresponding +-1 values.
    """

    support: tuple
    signs: tuple
    s: int

    def __post_init__(self):
        if len(self.support) != len(self.signs) or len(self.support) > self.s:
            raise ArgumentError("vertex support/signs mismatch")
        if any(sg not in (-1, 1) for sg in self.signs):
            raise ArgumentError("vertex signs must be +-1")

    def as_vector(self, n: int) -> np.ndarray:
        u = np.zeros(n)
        u[list(self.support)] = self.signs
        return u


@dataclass(frozen=True)
class SparseSignal:
    """A signal vector together with its nominal sparsity level."""

    values: np.ndarray
    nominal_sparsity: int

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if self.nominal_sparsity > v.size:
            raise ArgumentError("nominal sparsity exceeds signal dimension")

    @property
    def n(self) -> int:
        return self.values.size


def norm_s1(x, s: int) -> float:
    """Sum of the ``s`` largest absolute entries of ``x``.

    Equals max_{u in P_s} u^T x; at s=1 it is the sup-norm and at
    s=dim(x) the l1-norm.
    """
    x = np.asarray(x, dtype=float).ravel()
    if not 1 <= s <= x.size:
        raise ArgumentError(f"s must satisfy 1 <= s <= {x.size}, got {s}")
    a = np.abs(x)
    if s == x.size:
        return float(a.sum())
    return float(np.partition(a, x.size - s)[x.size - s:].sum())


def argmax_over_Ps(c, s: int) -> PsVertex:
    """Maximize c^T u over the polytope P_s.

    The maximum is attained at the vertex carrying sign(c_i) on the
    indices of the s largest |c_i|. Ties break toward the lowest index,
    and zero entries selected into the support get sign +1, so the
    output is deterministic.
    """
    c = np.asarray(c, dtype=float).ravel()
    if not 1 <= s <= c.size:
        raise ArgumentError(f"s must satisfy 1 <= s <= {c.size}, got {s}")
    idx = np.argsort(-np.abs(c), kind="stable")[:s]
    idx = np.sort(idx)
    signs = tuple(1 if c[i] >= 0 else -1 for i in idx)
    return PsVertex(support=tuple(int(i) for i in idx), signs=signs, s=s)


def hard_threshold(w, s: int) -> np.ndarray:
    """Zero all but the ``s`` largest-magnitude entries of ``w``.

    The result is the best s-sparse approximation of ``w`` in l1 (ties
    broken toward the lowest index).
    """
    w = np.asarray(w, dtype=float).ravel()
    if not 0 <= s <= w.size:
        raise ArgumentError(f"s must satisfy 0 <= s <= {w.size}, got {s}")
    out = np.zeros_like(w)
    if s:
        idx = np.argsort(-np.abs(w), kind="stable")[:s]
        out[idx] = w[idx]
    return out


def mutual_incoherence(A: SensingMatrix) -> float:
    """Maximum over ordered pairs i != j of |A_i^T A_j| / (A_i^T A_i).

    Note the asymmetric denominator: row index i normalizes.
    """
    G = A.entries.T @ A.entries
    diag = np.diag(G).copy()
    if np.any(diag == 0.0):
        j = int(np.flatnonzero(diag == 0.0)[0])
        raise ArgumentError(f"column {j} of the sensing matrix is zero")
    off = np.abs(G)
    np.fill_diagonal(off, -np.inf)
    if A.n == 1:
        return 0.0
    return float(np.max(off.max(axis=1) / diag))


def save_matrix(path, A: SensingMatrix) -> None:
    """Write a matrix in the shared text format ("k n" header + rows)."""
    path = Path(path)
    with path.open("w") as fh:
        fh.write(f"{A.k} {A.n}\n")
        for row in A.entries:
            fh.write(" ".join(f"{v:.17g}" for v in row) + "\n")


def load_matrix(path) -> SensingMatrix:
    """Read a matrix in the shared text format."""
    path = Path(path)
    with path.open() as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ArgumentError(f"{path}: expected 'k n' header line")
        try:
            k, n = int(header[0]), int(header[1])
        except ValueError:
            raise ArgumentError(f"{path}: non-integer dimensions in header") from None
        data = np.loadtxt(fh, ndmin=2)
    if data.shape != (k, n):
        raise ArgumentError(f"{path}: header says {k}x{n} but body is "
                            f"{data.shape[0]}x{data.shape[1]}")
    norms = np.linalg.norm(data, axis=0)
    normalized = bool(np.all(np.abs(norms - 1.0) <= NORMALIZATION_TOL))
    return SensingMatrix(data, column_normalized=normalized)


def save_sidecar(path, payload: dict) -> None:
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")
