"""
Core Module - Foundational Building Blocks 🧱

Types, configuration, errors, dense tensor arithmetic and the permutation
abstraction that every other sub-package consumes.
"""

from .errors import NwrsError
from .permutation import Permutation, compose, inverse, matrix_view
from .tensor import as_tensor, cosine, cosine_matrix, matmul

__all__ = [
    "NwrsError",
    "Permutation",
    "as_tensor",
    "compose",
    "cosine",
    "cosine_matrix",
    "inverse",
    "matmul",
    "matrix_view",
]
