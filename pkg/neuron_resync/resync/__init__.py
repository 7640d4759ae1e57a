"""
Resync Package - Permutation Recovery 🔁

Similarity matrices, matching, whole-model re-synchronization with Ψ
scoring, the ℓ1 norm-ranking baseline and output-redundancy analysis.
"""

from .analysis import neuron_outputs, output_cosine, pairwise_output_cosine, redundant_pairs
from .baseline import NormRanking, baseline_norm_ranking
from .matching import Match, assignment_score, match_neurons, recover_permutation
from .similarity import layer_similarity, similarity_matrix
from .synchronizer import psi, resync_model

__all__ = [
    "Match",
    "NormRanking",
    "assignment_score",
    "baseline_norm_ranking",
    "layer_similarity",
    "match_neurons",
    "neuron_outputs",
    "output_cosine",
    "pairwise_output_cosine",
    "psi",
    "recover_permutation",
    "redundant_pairs",
    "resync_model",
    "similarity_matrix",
]
