"""
Tensor Primitives - Dense Arithmetic 🧮

Thin, validated wrappers over numpy for the handful of dense operations the
rest of the package relies on. Tensors are float32 ``numpy.ndarray`` objects;
every reduction accumulates in float64.
"""

from typing import Sequence, Union

import numpy as np

from .errors import ShapeError

ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]

# ╭──────────────────────────────────────────────────────╮
# │  🧱 Construction                                      │
# ╰──────────────────────────────────────────────────────╯


def as_tensor(values: ArrayLike, allow_nonfinite: bool = False) -> np.ndarray:
    """Convert ``values`` into a contiguous float32 tensor.

    Args:
        values: Nested sequence or array
        allow_nonfinite: Accept NaN/Inf entries (degenerate cases only)

    Returns:
        C-contiguous float32 array

    Raises:
        ShapeError: If the tensor is empty or holds non-finite values
    """
    tensor = np.ascontiguousarray(values, dtype=np.float32)
    if tensor.size == 0:
        raise ShapeError("tensor must have at least one element")
    if not allow_nonfinite and not np.all(np.isfinite(tensor)):
        raise ShapeError("tensor holds non-finite values")
    return tensor


# ╭──────────────────────────────────────────────────────╮
# │  ✖️ Products                                          │
# ╰──────────────────────────────────────────────────────╯


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product with float64 accumulation.

    The result keeps the wider of the two input dtypes, so float32 operands
    give a float32 product and float64 operands stay float64.

    Args:
        a: Matrix of shape (m, k)
        b: Matrix of shape (k, n)

    Returns:
        Matrix of shape (m, n)

    Raises:
        ShapeError: If either operand is not 2-D or inner dims differ
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or b.ndim != 2:
        raise ShapeError(f"matmul needs 2-D operands, got {a.ndim}-D and {b.ndim}-D")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul inner dimensions differ: {a.shape} x {b.shape}")
    out_dtype = np.result_type(a.dtype, b.dtype, np.float32)
    product = a.astype(np.float64, copy=False) @ b.astype(np.float64, copy=False)
    return product.astype(out_dtype, copy=False)


def cosine(u: ArrayLike, v: ArrayLike) -> float:
    """Cosine similarity of two vectors.

    Zero-norm vectors score 0.0 so that fully pruned neurons cannot poison a
    similarity matrix with NaN.

    Raises:
        ShapeError: If the vectors differ in length
    """
    a = np.asarray(u, dtype=np.float64).ravel()
    b = np.asarray(v, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ShapeError(f"cosine needs equal lengths, got {a.size} and {b.size}")
    norm_a = float(np.linalg.norm(a))
    norm_b = float(np.linalg.norm(b))
    if norm_a == 0.0 or norm_b == 0.0:
        return 0.0
    value = float(np.dot(a, b)) / (norm_a * norm_b)
    return float(np.clip(value, -1.0, 1.0))


def cosine_matrix(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """Pairwise cosine similarity between the rows of two matrices.

    Entry (i, j) is ``cosine(rows_a[i], rows_b[j])``. Rows are normalized
    independently, so each output row can be computed on its own.

    Args:
        rows_a: Matrix of shape (n, d)
        rows_b: Matrix of shape (m, d)

    Returns:
        float64 matrix of shape (n, m) clipped to [-1, 1]
    """
    a = np.asarray(rows_a, dtype=np.float64)
    b = np.asarray(rows_b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ShapeError(f"cosine_matrix needs (n, d) and (m, d), got {a.shape} and {b.shape}")
    return np.clip(_unit_rows(a) @ _unit_rows(b).T, -1.0, 1.0)


def _unit_rows(matrix: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(matrix, axis=1, keepdims=True)
    safe = np.where(norms == 0.0, 1.0, norms)
    return np.where(norms == 0.0, 0.0, matrix / safe)
