"""
Matching - Similarity Matrix to Bijection 🧩

Three matchers turn a square similarity matrix into a permutation:

- greedy: repeatedly take the globally largest unmatched entry
- exact: maximum-weight linear assignment
- rowargmax: per-row argmax, with colliding rows re-matched greedily

Ties always resolve to the lowest index.
"""

import logging
from typing import List, NamedTuple, Optional, Tuple

import numpy as np
from scipy.optimize import linear_sum_assignment

from ..core.errors import ShapeError, ValidationError
from ..core.permutation import Permutation
from ..core.types import MatchMethod

logger = logging.getLogger(__name__)


class Match(NamedTuple):
    """A recovered bijection and how confidently it was found."""

    permutation: Permutation
    margin: float
    ties: int
    duplicates: int = 0


def _check_matrix(similarity: np.ndarray) -> np.ndarray:
    matrix = np.asarray(similarity, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise ShapeError(f"similarity matrix must be square and non-empty, got {matrix.shape}")
    if np.isnan(matrix).any():
        raise ValidationError("similarity matrix contains NaN")
    return matrix


# ╭──────────────────────────────────────────────────────╮
# │  🔍 Matchers                                          │
# ╰──────────────────────────────────────────────────────╯


def greedy_global(matrix: np.ndarray, fixed: Optional[List[int]] = None) -> List[int]:
    """Greedy matching on the flattened matrix in descending order.

    ``fixed`` pre-assigns rows (entries ``>= 0``); the rest are filled.
    """
    n = matrix.shape[0]
    mapping = list(fixed) if fixed is not None else [-1] * n
    row_used = [col >= 0 for col in mapping]
    col_used = [False] * n
    for col in mapping:
        if col >= 0:
            col_used[col] = True
    remaining = row_used.count(False)
    for flat in np.argsort(-matrix.ravel(), kind="stable"):
        if remaining == 0:
            break
        row, col = divmod(int(flat), n)
        if row_used[row] or col_used[col]:
            continue
        mapping[row] = col
        row_used[row] = col_used[col] = True
        remaining -= 1
    return mapping


def exact_assignment(matrix: np.ndarray) -> List[int]:
    """Assignment maximizing the total similarity."""
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    mapping = [0] * matrix.shape[0]
    for row, col in zip(rows, cols):
        mapping[int(row)] = int(col)
    return mapping


def row_argmax(matrix: np.ndarray) -> Tuple[List[int], int]:
    """Literal per-row argmax, made bijective.

    Rows whose argmax column is claimed by another row are re-matched by
    :func:`greedy_global` over the unclaimed columns.

    Returns:
        Tuple of (mapping, number of colliding rows)
    """
    proposals = np.argmax(matrix, axis=1)
    counts = np.bincount(proposals, minlength=matrix.shape[0])
    mapping = [int(col) if counts[col] == 1 else -1 for col in proposals]
    collided = mapping.count(-1)
    if collided:
        logger.warning("row argmax proposed duplicate columns for %d rows; falling back to greedy", collided)
        mapping = greedy_global(matrix, mapping)
    return mapping, collided


# ╭──────────────────────────────────────────────────────╮
# │  📊 Diagnostics                                       │
# ╰──────────────────────────────────────────────────────╯


def match_diagnostics(matrix: np.ndarray, mapping: List[int]) -> Tuple[float, int]:
    """Minimum match margin and tie count of ``mapping`` on ``matrix``.

    The margin of a row is its matched score minus the best other score in
    that row (``-1`` when the row has no other entry). A tie is a row whose
    matched score equals some other entry exactly.
    """
    n = matrix.shape[0]
    margin = np.inf
    ties = 0
    for row, col in enumerate(mapping):
        matched = matrix[row, col]
        others = np.delete(matrix[row], col)
        best_other = others.max() if n > 1 else -1.0
        margin = min(margin, matched - best_other)
        if n > 1 and np.any(others == matched):
            ties += 1
    return float(margin), ties


def assignment_score(similarity: np.ndarray, perm: Permutation) -> float:
    """Total similarity ``Σ_i S[i, perm(i)]``."""
    matrix = _check_matrix(similarity)
    return float(matrix[np.arange(perm.size), perm.as_array()].sum())


# ╭──────────────────────────────────────────────────────╮
# │  🚀 Entry Points                                      │
# ╰──────────────────────────────────────────────────────╯


def match_neurons(similarity: np.ndarray, method: MatchMethod = MatchMethod.GREEDY_GLOBAL) -> Match:
    """Recover a bijection from ``similarity`` and report its diagnostics.

    Raises:
        ShapeError: If the matrix is not square
        ValidationError: If the matrix contains NaN
    """
    matrix = _check_matrix(similarity)
    method = MatchMethod(method)
    duplicates = 0
    if method is MatchMethod.EXACT_ASSIGNMENT:
        mapping = exact_assignment(matrix)
    elif method is MatchMethod.ROW_ARGMAX:
        mapping, duplicates = row_argmax(matrix)
    else:
        mapping = greedy_global(matrix)
    margin, ties = match_diagnostics(matrix, mapping)
    return Match(Permutation(tuple(mapping)), margin, ties, duplicates)


def recover_permutation(similarity: np.ndarray, method: MatchMethod = MatchMethod.GREEDY_GLOBAL) -> Permutation:
    """Permutation mapping reference neuron ``i`` to its suspect position."""
    return match_neurons(similarity, method).permutation
