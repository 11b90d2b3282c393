"""Seeded, deterministic sensing-matrix generators.

Families: dense Gaussian, random rows of the real trigonometric system
on [0, 1), random row cuts of a Hadamard matrix, and the fixed-size 2-D
convolution operator (32x32 signal grid, 15x15 seeded kernel, output
restricted to the 32x31 subgrid dropping the first column). All
generation uses the PCG64 generator, so a fixed spec reproduces a
bit-identical matrix.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.linalg import hadamard

from .core import SensingMatrix
from .errors import ArgumentError

CONV_GRID = 32
CONV_KERNEL_HALF = 7           # kernel support {-7..7}^2
CONV_K = CONV_GRID * (CONV_GRID - 1)   # 992 rows
CONV_N = CONV_GRID * CONV_GRID         # 1024 columns


class Family(Enum):
    GAUSSIAN = "gaussian"
    FOURIER_ROWS = "fourier"
    HADAMARD_CUT = "hadamard"
    CONVOLUTION = "conv"

    @classmethod
    def parse(cls, name: str) -> "Family":
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ArgumentError(f"unknown matrix family {name!r}") from None


@dataclass(frozen=True)
class GenSpec:
    family: Family
    k: int
    n: int
    seed: int = 0
    normalize: bool = True

    def __post_init__(self):
        if self.k < 1 or self.n < 1:
            raise ArgumentError("k and n must be >= 1")
        if self.family is Family.HADAMARD_CUT and self.n & (self.n - 1):
            raise ArgumentError("Hadamard cuts need n to be a power of two")
        if self.family is Family.CONVOLUTION and (self.k, self.n) != (CONV_K,
                                                                      CONV_N):
            raise ArgumentError(f"convolution family is fixed at k={CONV_K}, "
                                f"n={CONV_N}")
        if self.family is not Family.CONVOLUTION and self.k > self.n:
            raise ArgumentError("generators produce wide matrices (k <= n)")


def _fourier_basis(n: int) -> np.ndarray:
    """Real trigonometric system sampled at t = i/n: the constant row,
    cos/sin pairs, and (for even n) the alternating-sign row."""
    t = np.arange(n) / n
    rows = [np.ones(n)]
    for j in range(1, (n - 1) // 2 + 1):
        rows.append(np.cos(2 * np.pi * j * t))
        rows.append(np.sin(2 * np.pi * j * t))
    if n % 2 == 0:
        rows.append(np.cos(np.pi * n * t))  # cos(pi*i) = (-1)^i
    return np.vstack(rows[:n])


def _convolution_matrix(rng) -> np.ndarray:
    g, half = CONV_GRID, CONV_KERNEL_HALF
    kernel = rng.standard_normal((2 * half + 1, 2 * half + 1))
    A = np.zeros((CONV_K, CONV_N))
    row = 0
    for p in range(g):
        for q in range(1, g):          # output grid drops column 0
            col_lo_i, col_hi_i = max(0, p - half), min(g - 1, p + half)
            col_lo_j, col_hi_j = max(0, q - half), min(g - 1, q + half)
            for i in range(col_lo_i, col_hi_i + 1):
                for j in range(col_lo_j, col_hi_j + 1):
                    A[row, i * g + j] = kernel[p - i + half, q - j + half]
            row += 1
    return A


def generate(spec: GenSpec) -> SensingMatrix:
    """Build the sensing matrix a generation spec describes."""
    rng = np.random.default_rng(spec.seed)
    if spec.family is Family.GAUSSIAN:
        A = rng.standard_normal((spec.k, spec.n))
    elif spec.family is Family.FOURIER_ROWS:
        basis = _fourier_basis(spec.n)
        rows = np.sort(rng.choice(spec.n, size=spec.k, replace=False))
        A = basis[rows]
    elif spec.family is Family.HADAMARD_CUT:
        H = hadamard(spec.n).astype(float)
        rows = np.sort(rng.choice(spec.n, size=spec.k, replace=False))
        A = H[rows]
    else:
        A = _convolution_matrix(rng)
    M = SensingMatrix(A, seed=spec.seed)
    return M.normalized() if spec.normalize else M
