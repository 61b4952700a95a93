"""Algebra of word representations.

Two representation kinds share one flat-array storage convention:

* ``vector``: an ordinary dense vector of ``dim`` floats, inner product the
  usual dot.
* ``matrix``: a real symmetric ``dim x dim`` matrix stored packed as its
  upper triangle in row-major order, ``dim*(dim+1)//2`` floats. The inner
  product is the trace form Tr(AB), which over packed storage is the
  multiplier-weighted dot: diagonal entries weigh 1, off-diagonals 2.

Matrices are plain symmetric, not density operators: eigenvalues may be
negative and traces are unconstrained. Nothing here renormalizes.
"""

from __future__ import annotations

from functools import lru_cache
from typing import NamedTuple

import numpy as np


class ZeroNormError(ValueError):
    """Cosine or normalization was asked of an all-zero representation."""


def packed_length(dim: int) -> int:
    """Number of packed parameters for a symmetric dim x dim matrix."""
    if dim < 1:
        raise ValueError(f"dim must be >= 1, got {dim}")
    return dim * (dim + 1) // 2


def packed_dim(length: int) -> int:
    """Inverse of packed_length; rejects non-triangular lengths."""
    dim = int((np.sqrt(8 * length + 1) - 1) / 2 + 0.5)
    if dim < 1 or dim * (dim + 1) // 2 != length:
        raise ValueError(f"{length} is not a triangular number")
    return dim


@lru_cache(maxsize=None)
def _cached_multipliers(dim: int) -> np.ndarray:
    m = np.full(packed_length(dim), 2.0)
    m[diag_indices(dim)] = 1.0
    m.setflags(write=False)
    return m


@lru_cache(maxsize=None)
def _cached_diag_indices(dim: int) -> np.ndarray:
    # row i starts at offset i*dim - i*(i-1)//2; its diagonal entry is first
    i = np.arange(dim)
    idx = i * dim - i * (i - 1) // 2
    idx.setflags(write=False)
    return idx


def inner_multipliers(dim: int) -> np.ndarray:
    """Trace-form weights per packed slot: 1 on diagonal slots, 2 elsewhere."""
    return _cached_multipliers(dim)


def diag_indices(dim: int) -> np.ndarray:
    """Packed offsets of the diagonal entries, ascending."""
    return _cached_diag_indices(dim)


def pack(matrix: np.ndarray, *, tol: float = 1e-9) -> np.ndarray:
    """Upper triangle of a symmetric matrix, row-major, as float64.

    Raises ValueError if the input is not square or departs from symmetry
    by more than ``tol`` relative to its largest entry.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 1.0)
    if not np.all(np.abs(m - m.T) <= tol * scale):
        raise ValueError("matrix is not symmetric within tolerance")
    iu = np.triu_indices(m.shape[0])
    return np.ascontiguousarray(m[iu])


def unpack(packed: np.ndarray) -> np.ndarray:
    """Full symmetric matrix from its packed upper triangle."""
    p = np.asarray(packed, dtype=np.float64)
    if p.ndim != 1:
        raise ValueError(f"expected a 1-d packed array, got shape {p.shape}")
    dim = packed_dim(p.shape[0])
    out = np.zeros((dim, dim))
    iu = np.triu_indices(dim)
    out[iu] = p
    out.T[iu] = p
    return out


def packed_inner(a: np.ndarray, b: np.ndarray) -> float:
    """Tr(AB) over packed storage: sum of diagonal products plus twice the
    off-diagonal products."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    m = inner_multipliers(packed_dim(a.shape[0]))
    return float(np.dot(a * m, b))


def packed_norm(a: np.ndarray) -> float:
    """Frobenius norm, sqrt(Tr(A^2))."""
    return float(np.sqrt(packed_inner(a, a)))


def packed_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance ||A - B||."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return packed_norm(a - b)


def packed_cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Tr(AB) / (||A|| ||B||), clamped to [-1, 1]."""
    na = packed_norm(a)
    nb = packed_norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("cosine of a zero-norm representation")
    return float(np.clip(packed_inner(a, b) / (na * nb), -1.0, 1.0))


def dense_inner(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.dot(a, b))


def dense_norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.asarray(a, dtype=np.float64)))


def dense_cosine(a: np.ndarray, b: np.ndarray) -> float:
    na = dense_norm(a)
    nb = dense_norm(b)
    if na == 0.0 or nb == 0.0:
        raise ZeroNormError("cosine of a zero-norm representation")
    return float(np.clip(dense_inner(a, b) / (na * nb), -1.0, 1.0))


def kind_inner(a: np.ndarray, b: np.ndarray, kind: str) -> float:
    """Dispatch to the inner product matching a representation kind."""
    if kind == "vector":
        return dense_inner(a, b)
    if kind == "matrix":
        return packed_inner(a, b)
    raise ValueError(f"unknown representation kind {kind!r}")


def add_scaled(scale: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """scale*a + b elementwise; valid for both packed and dense storage."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    return scale * a + b


class EigenDecomposition(NamedTuple):
    """Eigenvalues ascending, eigenvectors as matching columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.T


_MAX_JACOBI_DIM = 64
_JACOBI_SWEEPS = 100


def eigendecompose(packed: np.ndarray) -> EigenDecomposition:
    """Full eigensystem of a packed symmetric matrix by cyclic Jacobi.

    Rotations are applied in row-major sweep order until the off-diagonal
    mass falls below 1e-14 of the Frobenius norm. Quadratic convergence
    makes a handful of sweeps enough at the supported sizes (dim <= 64).
    """
    a = unpack(packed)
    dim = a.shape[0]
    if dim > _MAX_JACOBI_DIM:
        raise ValueError(f"eigendecompose supports dim <= {_MAX_JACOBI_DIM}, got {dim}")
    vec = np.eye(dim)
    if dim == 1:
        return EigenDecomposition(np.diagonal(a).copy(), vec)

    frob = np.linalg.norm(a)
    if frob == 0.0:
        return EigenDecomposition(np.zeros(dim), vec)
    stop = 1e-14 * frob

    for _ in range(_JACOBI_SWEEPS):
        off = np.sqrt(2.0 * np.sum(np.triu(a, 1) ** 2))
        if off <= stop:
            break
        for p in range(dim - 1):
            for q in range(p + 1, dim):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vcol_p = vec[:, p].copy()
                vcol_q = vec[:, q].copy()
                vec[:, p] = c * vcol_p - s * vcol_q
                vec[:, q] = s * vcol_p + c * vcol_q
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    values = np.diagonal(a).copy()
    order = np.argsort(values, kind="stable")
    return EigenDecomposition(values[order], vec[:, order])


def pure_state_projector(eigenvalue: float, eigenvector: np.ndarray) -> np.ndarray:
    """Signed rank-one projector sign(lambda) * vv^T, packed.

    The unit-normalized eigenvector enters as an outer product, so the
    projector is insensitive to the eigenvector's own sign; the eigenvalue
    contributes its sign only (zero counts as positive).
    """
    v = np.asarray(eigenvector, dtype=np.float64)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d eigenvector, got shape {v.shape}")
    norm = np.linalg.norm(v)
    if norm == 0.0:
        raise ZeroNormError("cannot project on a zero eigenvector")
    v = v / norm
    sign = -1.0 if eigenvalue < 0 else 1.0
    return pack(sign * np.outer(v, v))
