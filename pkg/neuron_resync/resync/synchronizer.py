"""
Synchronizer - Whole-Model Re-synchronization 🔁

Walks the permutable layers front to back. At every layer the suspect's
neurons are matched against the reference, the recovered permutation is
undone (which also restores the next layer's input order), and the next
layer is matched against an already-aligned input axis.
"""

import logging
from typing import Mapping, Optional, Tuple

from ..attack.permutation import permute_layer
from ..core.errors import ArchitectureMismatchError, PermutationError
from ..core.permutation import Permutation, check_size, inverse
from ..core.types import LayerResync, MatchMethod, ModelBundle, ResyncReport
from .matching import match_neurons
from .similarity import layer_similarity

logger = logging.getLogger(__name__)


def psi(true_perm: Permutation, recovered: Permutation) -> float:
    """Percentage of neurons whose recovered position is the true one.

    Raises:
        PermutationError: If the sizes differ
    """
    if true_perm.size != recovered.size:
        raise PermutationError(f"cannot score sizes {true_perm.size} and {recovered.size}")
    hits = sum(1 for a, b in zip(true_perm.mapping, recovered.mapping) if a == b)
    return 100.0 * hits / true_perm.size


def resync_model(
    reference: ModelBundle,
    suspect: ModelBundle,
    method: MatchMethod = MatchMethod.GREEDY_GLOBAL,
    true_perms: Optional[Mapping[int, Permutation]] = None,
) -> Tuple[ModelBundle, ResyncReport]:
    """Restore the reference neuron order in ``suspect``.

    Args:
        reference: Original model
        suspect: Permuted and possibly perturbed copy
        method: Matcher used at every layer
        true_perms: Permutations actually applied, keyed by layer, for
            evaluation; layers not listed are taken as unpermuted

    Returns:
        Tuple of (re-synchronized suspect, report)

    Raises:
        ArchitectureMismatchError: If the two models differ in architecture
    """
    if not reference.same_architecture(suspect):
        raise ArchitectureMismatchError("reference and suspect architectures differ")
    method = MatchMethod(method)
    fixed = suspect
    entries = []
    weighted_hits = 0.0
    total_neurons = 0

    for layer in range(reference.depth - 1):
        neurons = reference.layers[layer].neurons
        match = match_neurons(layer_similarity(reference, fixed, layer), method)
        fixed = permute_layer(fixed, layer, inverse(match.permutation))

        score = None
        if true_perms is not None:
            truth = true_perms.get(layer, Permutation.identity(neurons))
            check_size(truth, neurons, f"layer {layer}")
            score = psi(truth, match.permutation)
            weighted_hits += score * neurons
            total_neurons += neurons
        entries.append(
            LayerResync(layer, match.permutation, score, match.margin, match.ties, match.duplicates)
        )
        logger.info(
            "layer %d: margin=%.6f ties=%d duplicates=%d%s",
            layer,
            match.margin,
            match.ties,
            match.duplicates,
            "" if score is None else f" psi={score}",
        )

    overall = weighted_hits / total_neurons if total_neurons else None
    if true_perms is not None and overall is None:
        overall = 100.0
    return fixed, ResyncReport(entries, overall, method)
