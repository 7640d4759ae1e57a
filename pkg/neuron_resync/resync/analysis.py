"""
Output Analysis - Functional Redundancy Between Neurons 🔬

Cosine similarity between the outputs of two neurons over a dataset, read
before or after the activation. Scaled copies of a neuron are identical
before the activation; ReLU can make different neurons identical after it.
"""

from typing import List, Tuple, Union

import numpy as np

from ..attack.permutation import check_layer
from ..core.errors import ValidationError
from ..core.tensor import cosine, cosine_matrix
from ..core.types import Dataset, ModelBundle, Stage
from ..model.network import forward

Inputs = Union[Dataset, np.ndarray]


def neuron_outputs(bundle: ModelBundle, layer: int, data: Inputs, stage: Stage = Stage.POST) -> np.ndarray:
    """``[N_l, samples · M_l]`` matrix of every neuron's outputs over ``data``."""
    check_layer(bundle, layer)
    inputs = data.inputs if isinstance(data, Dataset) else np.asarray(data)
    if tuple(inputs.shape) == bundle.input_shape:
        inputs = inputs[None]
    trace = forward(bundle, inputs)
    values = trace.pre_activations[layer] if Stage(stage) is Stage.PRE else trace.activations[layer]
    return np.moveaxis(values, 1, 0).reshape(values.shape[1], -1)


def output_cosine(
    bundle: ModelBundle,
    layer: int,
    i: int,
    j: int,
    data: Inputs,
    stage: Stage = Stage.POST,
) -> float:
    """Cosine between the concatenated outputs of neurons ``i`` and ``j``.

    Raises:
        ValidationError: If a layer or neuron index is out of range
    """
    check_layer(bundle, layer)
    neurons = bundle.layers[layer].neurons
    for index in (i, j):
        if not 0 <= index < neurons:
            raise ValidationError(f"neuron {index} out of range for layer {layer} ({neurons} neurons)")
    outputs = neuron_outputs(bundle, layer, data, stage)
    return cosine(outputs[i], outputs[j])


def pairwise_output_cosine(bundle: ModelBundle, layer: int, data: Inputs, stage: Stage = Stage.POST) -> np.ndarray:
    """Full ``N_l × N_l`` output-similarity matrix of ``layer``."""
    outputs = neuron_outputs(bundle, layer, data, stage)
    return cosine_matrix(outputs, outputs)


def redundant_pairs(matrix: np.ndarray, threshold: float = 0.99) -> List[Tuple[int, int, float]]:
    """Neuron pairs ``i < j`` whose output cosine reaches ``threshold``."""
    rows, cols = np.nonzero(np.triu(np.asarray(matrix) >= threshold, k=1))
    return [(int(i), int(j), float(matrix[i, j])) for i, j in zip(rows, cols)]
