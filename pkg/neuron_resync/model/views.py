"""
Neuron Views - Per-Neuron Parameter Layouts 🔭

Reshapes layer weights so that row ``i`` is the parameter vector of neuron
``i``: an FC column, or a conv filter flattened as (in_channel, kh, kw).
"""

import numpy as np

from ..core.errors import ShapeError
from ..core.types import LayerSpec


def neuron_vectors(spec: LayerSpec, weight: np.ndarray) -> np.ndarray:
    """View ``weight`` as an ``[N_l, fan_in]`` float64 matrix."""
    weight = np.asarray(weight)
    if tuple(weight.shape) != spec.weight_shape:
        raise ShapeError(f"weight shape {weight.shape} does not match layer {spec.weight_shape}")
    if spec.is_conv:
        return weight.reshape(spec.out_dim, -1).astype(np.float64)
    return weight.T.astype(np.float64)


def from_neuron_vectors(spec: LayerSpec, vectors: np.ndarray) -> np.ndarray:
    """Inverse of :func:`neuron_vectors`, returning float32 weights."""
    if spec.is_conv:
        return np.ascontiguousarray(vectors.reshape(spec.weight_shape), dtype=np.float32)
    return np.ascontiguousarray(vectors.T, dtype=np.float32)
