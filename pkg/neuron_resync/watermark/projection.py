"""
Projection Watermark - White-Box Signature in Weights 🔐

A secret Gaussian matrix ``X`` projects a feature vector of the target
layer's weights; thresholding ``sigmoid(X·f)`` reads the mark. Embedding adds
``λ · Σ BCE(sigmoid(X·f), b)`` to the training loss.

The feature ``f`` is the target weight tensor averaged over its output-neuron
axis, so it follows the input-channel order of the layer. Permuting the
layer in front of the target scrambles ``f``; re-synchronization restores it.
"""

import logging
from typing import Mapping, Optional, Tuple

import numpy as np
from scipy.special import expit

from ..attack.permutation import check_layer
from ..core.config import STREAM_BITS, STREAM_PROJECTION, WATERMARK_STRENGTH
from ..core.errors import ValidationError, WatermarkError
from ..core.types import Dataset, Extraction, LayerSpec, ModelBundle, TrainConfig, WatermarkRecord, tensor_name
from ..core.utils import rng_for
from ..trainer.backprop import Gradients
from ..trainer.sgd import train

logger = logging.getLogger(__name__)

# ╭──────────────────────────────────────────────────────╮
# │  🧮 Features & Projection                             │
# ╰──────────────────────────────────────────────────────╯


def layer_feature(spec: LayerSpec, weight: np.ndarray) -> np.ndarray:
    """Mean over the output-neuron axis, remaining axes flattened."""
    return np.asarray(weight, dtype=np.float64).mean(axis=spec.neuron_axis).ravel()


def feature_vector(bundle: ModelBundle, layer: int) -> np.ndarray:
    """Watermark feature of ``layer`` in ``bundle``."""
    check_layer(bundle, layer)
    return layer_feature(bundle.layers[layer], bundle.weight(layer))


def feature_dim(spec: LayerSpec) -> int:
    return int(np.prod(spec.weight_shape)) // spec.neurons


def projection_matrix(seed: int, num_bits: int, dim: int) -> np.ndarray:
    """Secret ``T_b × dim`` standard-normal projection for ``seed``."""
    return rng_for(seed, STREAM_PROJECTION).standard_normal((num_bits, dim))


def random_bits(num_bits: int, seed: int) -> np.ndarray:
    """Uniform random mark of ``num_bits`` bits."""
    return rng_for(seed, STREAM_BITS).integers(0, 2, size=num_bits, dtype=np.uint8)


def default_record(
    bundle: ModelBundle,
    num_bits: int,
    seed: int,
    strength: float = WATERMARK_STRENGTH,
    target_layer: Optional[int] = None,
) -> WatermarkRecord:
    """Watermark record on the output layer with a random mark."""
    layer = bundle.depth - 1 if target_layer is None else target_layer
    return WatermarkRecord(layer, seed, strength, num_bits, bits=random_bits(num_bits, seed))


# ╭──────────────────────────────────────────────────────╮
# │  🏋️ Embedding                                         │
# ╰──────────────────────────────────────────────────────╯


class WatermarkRegularizer:
    """Training hook adding ``λ · Σ_i BCE(sigmoid((X f)_i), b_i)``."""

    def __init__(self, spec: LayerSpec, record: WatermarkRecord):
        if record.bits is None:
            raise WatermarkError("embedding needs the watermark bits")
        self.spec = spec
        self.record = record
        self.name = tensor_name(record.target_layer, "weight")
        self.projection = projection_matrix(record.projection_seed, record.num_bits, feature_dim(spec))
        self.bits = record.bits.astype(np.float64)

    def penalty(self, params: Mapping[str, np.ndarray]) -> Tuple[float, Gradients]:
        """Penalty value and its gradient with respect to the target weight."""
        weight = np.asarray(params[self.name], dtype=np.float64)
        logits = self.projection @ layer_feature(self.spec, weight)
        strength = self.record.strength
        value = strength * float(np.sum(np.logaddexp(0.0, logits) - self.bits * logits))
        grad_feature = strength * (self.projection.T @ (expit(logits) - self.bits))
        shape = list(self.spec.weight_shape)
        shape[self.spec.neuron_axis] = 1
        per_entry = grad_feature.reshape(shape) / self.spec.neurons
        return value, {self.name: np.broadcast_to(per_entry, self.spec.weight_shape).copy()}


def embed(bundle: ModelBundle, dataset: Dataset, config: TrainConfig, record: WatermarkRecord) -> ModelBundle:
    """Train ``bundle`` with the watermark regularizer attached.

    A zero strength trains without the hook. The returned bundle records the
    watermark parameters, never the bits, in its metadata.

    Raises:
        WatermarkError: If the record has no bits
        ValidationError: If the target layer does not exist
    """
    check_layer(bundle, record.target_layer)
    if record.bits is None:
        raise WatermarkError("embedding needs the watermark bits")
    spec = bundle.layers[record.target_layer]
    dim = feature_dim(spec)
    if record.num_bits > dim:
        logger.warning("embedding %d bits into a %d-dimensional feature exceeds capacity", record.num_bits, dim)
    record = record.with_(feature_dim=dim)
    hook = WatermarkRegularizer(spec, record) if record.strength > 0 else None
    trained = train(bundle, dataset, config.with_(watermark_hook=hook)).model
    trained.metadata["watermark"] = record.to_metadata()
    return trained


# ╭──────────────────────────────────────────────────────╮
# │  🔎 Extraction                                        │
# ╰──────────────────────────────────────────────────────╯


def pearson(scores: np.ndarray, bits: np.ndarray) -> float:
    """Pearson correlation between ``scores`` and the ±1 mapping of ``bits``; 0 if either is constant."""
    signs = 2.0 * np.asarray(bits, dtype=np.float64) - 1.0
    scores = np.asarray(scores, dtype=np.float64)
    if np.ptp(scores) == 0.0 or np.ptp(signs) == 0.0:
        return 0.0
    return float(np.corrcoef(scores, signs)[0, 1])


def extract(bundle: ModelBundle, record: WatermarkRecord) -> Extraction:
    """Read the mark back from ``bundle``.

    Returns:
        Thresholded bits, Pearson correlation of ``sigmoid(X·f)`` with the
        ±1 mark, and the bit error rate

    Raises:
        WatermarkError: If the record has no bits or does not fit the model
    """
    if record.bits is None:
        raise WatermarkError("extraction needs the watermark bits")
    try:
        check_layer(bundle, record.target_layer)
    except ValidationError as exc:
        raise WatermarkError(exc.detail) from exc
    spec = bundle.layers[record.target_layer]
    dim = feature_dim(spec)
    if record.feature_dim is not None and record.feature_dim != dim:
        raise WatermarkError(f"target layer feature has {dim} entries, watermark expects {record.feature_dim}")
    projection = projection_matrix(record.projection_seed, record.num_bits, dim)
    scores = expit(projection @ feature_vector(bundle, record.target_layer))
    bits = (scores > 0.5).astype(np.uint8)
    ber = float(np.count_nonzero(bits != record.bits)) / record.num_bits
    return Extraction(bits, pearson(scores, record.bits), ber)
