"""
Norm Ranking - ℓ1 Ordering Baseline 📏

Matches neurons by the rank of their ℓ1 norms. Exact for a pure permutation
with distinct norms, but any perturbation larger than the smallest norm gap
reorders the ranking.
"""

from typing import NamedTuple

import numpy as np

from ..core.errors import ShapeError
from ..core.permutation import Permutation
from ..core.types import LayerSpec
from ..model.views import neuron_vectors


class NormRanking(NamedTuple):
    permutation: Permutation
    ties: int


def l1_norms(spec: LayerSpec, weight: np.ndarray) -> np.ndarray:
    return np.abs(neuron_vectors(spec, weight)).sum(axis=1)


def baseline_norm_ranking(spec: LayerSpec, reference: np.ndarray, suspect: np.ndarray) -> NormRanking:
    """Pair the ``r``-th smallest reference norm with the ``r``-th smallest suspect norm.

    Ties in either ranking keep index order; ``ties`` counts equal adjacent
    norms in the reference ranking.

    Raises:
        ShapeError: If the tensors differ in shape
    """
    if tuple(np.shape(reference)) != tuple(np.shape(suspect)):
        raise ShapeError(f"reference {np.shape(reference)} and suspect {np.shape(suspect)} differ in shape")
    ref_norms = l1_norms(spec, reference)
    ref_order = np.argsort(ref_norms, kind="stable")
    sus_order = np.argsort(l1_norms(spec, suspect), kind="stable")
    mapping = np.empty(spec.neurons, dtype=np.int64)
    mapping[ref_order] = sus_order
    ties = int(np.count_nonzero(np.diff(ref_norms[ref_order]) == 0.0))
    return NormRanking(Permutation(tuple(int(v) for v in mapping)), ties)
