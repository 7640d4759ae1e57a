"""Shared, cached fixtures for the test suite. Cached objects must never be mutated."""

from functools import lru_cache
from typing import Dict, Optional, Tuple

import numpy as np

from neuron_resync.core.permutation import Permutation
from neuron_resync.core.types import Activation, LayerKind, LayerSpec, ModelBundle, WatermarkRecord
from neuron_resync.trainer.reference import ReferenceSetup, reference_setup, untrained_setup
from neuron_resync.watermark.projection import default_record, embed

WATERMARK_SEED = 7


@lru_cache(maxsize=None)
def mlp_setup() -> ReferenceSetup:
    return reference_setup(0)


@lru_cache(maxsize=None)
def conv_setup() -> ReferenceSetup:
    return reference_setup(0, conv=True)


@lru_cache(maxsize=None)
def watermarked_conv() -> Tuple[ModelBundle, WatermarkRecord]:
    """Conv reference trained with a 64-bit mark on its output layer."""
    setup = untrained_setup(0, conv=True)
    record = default_record(setup.model, 64, WATERMARK_SEED)
    marked = embed(setup.model, setup.dataset, setup.config, record)
    return marked, record.with_(feature_dim=marked.metadata["watermark"]["feature_dim"])


def random_inputs(bundle: ModelBundle, count: int, seed: int = 0) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal((count,) + bundle.input_shape).astype(np.float32)


def cyclic_shift(size: int) -> Permutation:
    """Derangement ``i -> i + 1 mod size``."""
    return Permutation(tuple((i + 1) % size for i in range(size)))


def fc_bundle(
    weights: Dict[int, np.ndarray],
    activations: Tuple[Activation, ...],
    biases: Optional[Dict[int, np.ndarray]] = None,
) -> ModelBundle:
    """Hand-built fully-connected bundle from ``(in, out)`` weight matrices."""
    layers = []
    tensors = {}
    biases = biases or {}
    for index in sorted(weights):
        weight = np.asarray(weights[index], dtype=np.float32)
        layers.append(
            LayerSpec(
                LayerKind.FULLY_CONNECTED,
                weight.shape[0],
                weight.shape[1],
                activations[index],
                has_bias=index in biases,
            )
        )
        tensors[f"layer{index}.weight"] = weight
        if index in biases:
            tensors[f"layer{index}.bias"] = np.asarray(biases[index], dtype=np.float32)
    return ModelBundle(layers, tensors, (layers[0].in_dim,))
