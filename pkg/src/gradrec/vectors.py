"""Numeric conventions for embedding vectors.

Embeddings are 1-D float32 arrays. To keep results bit-reproducible across
the library, the CLI and the HTTP service, every routine follows the same
convention: reductions (norms, means, dot products) are computed in float64,
and results are cast back to float32 only at API boundaries. Similarity
scores stay float64 scalars.
"""

from __future__ import annotations

import numpy as np

from .errors import DimMismatch, NonFiniteVector

# Tolerances for stored vectors: norms within NORM_ATOL are accepted as-is,
# drift up to RENORM_ATOL is repaired by re-normalizing, anything larger is
# rejected (the data was never unit-length to begin with).
NORM_ATOL = 1e-4
RENORM_ATOL = 1e-3


def as_vector(values, dim: int | None = None) -> np.ndarray:
    """Coerce to a finite 1-D float32 array, optionally checking its length."""
    v = np.asarray(values, dtype=np.float32)
    if v.ndim != 1:
        raise DimMismatch(f"expected a 1-D vector, got shape {v.shape}")
    if dim is not None and v.shape[0] != dim:
        raise DimMismatch(f"expected dim {dim}, got {v.shape[0]}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteVector("vector contains NaN or Inf")
    return v


def l2norm(v) -> float:
    """Euclidean norm, accumulated in float64."""
    return float(np.linalg.norm(np.asarray(v, dtype=np.float64)))


def unit(v) -> np.ndarray:
    """Unit-normalize to float32, dividing by the float64 norm.

    Caller is responsible for rejecting (near-)zero input with the
    domain-appropriate error; this raises a bare ValueError as a backstop.
    """
    x = np.asarray(v, dtype=np.float64)
    n = float(np.linalg.norm(x))
    if n < 1e-12:
        raise ValueError("cannot normalize a zero vector")
    return (x / n).astype(np.float32)


def unit_rows(mat) -> np.ndarray:
    """Row-wise unit normalization of a 2-D array, float32 result."""
    x = np.asarray(mat, dtype=np.float64)
    norms = np.linalg.norm(x, axis=1, keepdims=True)
    if np.any(norms < 1e-12):
        raise ValueError("cannot normalize zero rows")
    return (x / norms).astype(np.float32)


def row_norms(mat) -> np.ndarray:
    return np.linalg.norm(np.asarray(mat, dtype=np.float64), axis=1)


def cosine(a, b) -> float:
    """Cosine similarity of two vectors, computed in float64."""
    x = np.asarray(a, dtype=np.float64)
    y = np.asarray(b, dtype=np.float64)
    return float(np.dot(x, y) / (np.linalg.norm(x) * np.linalg.norm(y)))
