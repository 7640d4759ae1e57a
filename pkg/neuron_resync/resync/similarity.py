"""
Similarity - Neuron-to-Neuron Cosine Scores 📐

Entry ``(i, j)`` of a similarity matrix is the cosine between reference
neuron ``i`` and suspect neuron ``j``, computed over weight vectors only.
"""

import numpy as np

from ..core.errors import ArchitectureMismatchError, ShapeError
from ..core.tensor import cosine_matrix
from ..core.types import LayerSpec, ModelBundle
from ..model.views import neuron_vectors


def similarity_matrix(spec: LayerSpec, reference: np.ndarray, suspect: np.ndarray) -> np.ndarray:
    """Pairwise cosine between the neurons of two same-shaped weight tensors.

    Args:
        spec: Layer the tensors belong to
        reference: Reference weights
        suspect: Suspect weights

    Returns:
        ``N_l × N_l`` float64 matrix in [-1, 1]

    Raises:
        ShapeError: If either tensor does not match ``spec``
    """
    if tuple(np.shape(reference)) != tuple(np.shape(suspect)):
        raise ShapeError(f"reference {np.shape(reference)} and suspect {np.shape(suspect)} differ in shape")
    return cosine_matrix(neuron_vectors(spec, reference), neuron_vectors(spec, suspect))


def layer_similarity(reference: ModelBundle, suspect: ModelBundle, layer: int) -> np.ndarray:
    """Similarity matrix of ``layer`` between two bundles of one architecture."""
    if not reference.same_architecture(suspect):
        raise ArchitectureMismatchError("reference and suspect architectures differ")
    return similarity_matrix(reference.layers[layer], reference.weight(layer), suspect.weight(layer))
