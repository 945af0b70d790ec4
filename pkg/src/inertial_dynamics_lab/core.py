"""Dense finite-dimensional vector algebra shared by every module.

The lab works in R^n with IEEE doubles. The Hilbert space of the underlying
theory is restricted to R^n, where weak and norm convergence coincide, so
every "weak convergence" statement is reported as norm convergence.
"""

from __future__ import annotations

from collections.abc import Sequence
from typing import TypeAlias

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DimensionMismatchError, SingularMatrixError

Vec: TypeAlias = NDArray[np.float64]
Mat: TypeAlias = NDArray[np.float64]


def as_vec(values: ArrayLike) -> Vec:
    """Convert to a finite 1-D float64 array of dimension >= 1."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim == 0:
        v = v.reshape(1)
    if v.ndim != 1 or v.size == 0:
        raise ValueError(f"expected a non-empty vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def as_mat(values: ArrayLike) -> Mat:
    """Convert to a finite 2-D float64 array."""
    m = np.asarray(values, dtype=np.float64)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2 or m.size == 0:
        raise ValueError(f"expected a non-empty matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


def check_dim(v: Vec, dim: int, what: str = "vector") -> None:
    if v.shape != (dim,):
        raise DimensionMismatchError(dim, int(v.size), what)


def inner(a: Vec, b: Vec) -> float:
    """Euclidean scalar product."""
    if a.shape != b.shape:
        raise DimensionMismatchError(int(a.size), int(b.size))
    return float(np.dot(a, b))


def norm(a: Vec) -> float:
    """Euclidean norm."""
    return float(np.linalg.norm(a))


def apply(m: Mat, x: Vec) -> Vec:
    if m.shape[1] != x.size:
        raise DimensionMismatchError(m.shape[1], int(x.size), "matrix-vector")
    return m @ x


def solve_linear(m: Mat, b: Vec, tol: float = 1e-10) -> Vec:
    """Solve ``m x = b`` by LU with partial pivoting.

    The result satisfies ``|m x - b| <= tol * (1 + |b|)``; anything worse is
    reported as :class:`SingularMatrixError` carrying the residual achieved.
    """
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    check_dim(b, m.shape[0], "right-hand side")
    bound = tol * (1.0 + norm(b))
    try:
        x = np.linalg.solve(m, b)
    except np.linalg.LinAlgError:
        best, *_ = np.linalg.lstsq(m, b, rcond=None)
        raise SingularMatrixError(norm(m @ best - b)) from None
    residual = norm(m @ x - b)
    if not np.all(np.isfinite(x)) or residual > bound:
        raise SingularMatrixError(residual)
    return x


def symmetric_part(m: Mat) -> Mat:
    return 0.5 * (m + m.T)


def is_psd(m: Mat, tol: float = 1e-12) -> bool:
    """Positive semidefiniteness of the symmetric part."""
    eigs = np.linalg.eigvalsh(symmetric_part(m))
    return bool(eigs.min() >= -tol * max(1.0, float(np.abs(eigs).max())))


def block_diag(*blocks: Mat) -> Mat:
    rows = sum(b.shape[0] for b in blocks)
    cols = sum(b.shape[1] for b in blocks)
    out = np.zeros((rows, cols))
    r = c = 0
    for b in blocks:
        out[r : r + b.shape[0], c : c + b.shape[1]] = b
        r += b.shape[0]
        c += b.shape[1]
    return out


def ball_samples(rng: np.random.Generator, count: int, dim: int, radius: float) -> Mat:
    """``count`` points drawn uniformly in the closed ball of given radius."""
    directions = rng.standard_normal((count, dim))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.random(count) ** (1.0 / dim)
    return directions * radii[:, None]


def stack(parts: Sequence[Vec]) -> Vec:
    return np.concatenate([np.asarray(p, dtype=np.float64) for p in parts])
