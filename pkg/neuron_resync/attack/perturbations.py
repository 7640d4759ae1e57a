"""
Perturbations - Weight-Level Model Alterations 🌪️

Gaussian noise, symmetric quantization, magnitude pruning, the scalar-multiple
integrity attack and a dispatcher that applies any ``PerturbationSpec``
(fine-tuning included).
"""

import logging
import math
from typing import Dict, List, Optional

import numpy as np

from ..core.config import STREAM_NOISE
from ..core.errors import ValidationError
from ..core.types import Dataset, ModelBundle, PerturbationKind, PerturbationSpec, TrainConfig, tensor_name
from ..core.utils import rng_for, round_half_away
from ..trainer.reference import training_context
from ..trainer.sgd import fine_tune
from .permutation import check_layer

logger = logging.getLogger(__name__)

NOISE_SCALE_MODES = ("std", "variance")


def _targets(bundle: ModelBundle, layer: Optional[int]) -> List[int]:
    if layer is None:
        return list(range(bundle.depth))
    return [check_layer(bundle, layer)]


# ╭──────────────────────────────────────────────────────╮
# │  🎲 Gaussian Noise                                    │
# ╰──────────────────────────────────────────────────────╯


def noise_std(sigma: float, omega: float, scale_mode: str = "std") -> float:
    """Standard deviation of the additive noise for a layer of spread ``sigma``.

    ``"std"`` reads Ω as a multiple of the layer standard deviation;
    ``"variance"`` reads ``Ω·σ_l`` as the noise variance.
    """
    if scale_mode == "std":
        return omega * sigma
    if scale_mode == "variance":
        return math.sqrt(omega * sigma)
    raise ValidationError(f"unknown noise scale mode {scale_mode!r}")


def add_gaussian_noise(
    bundle: ModelBundle,
    layer: Optional[int],
    omega: float,
    seed: int,
    scale_mode: str = "std",
    include_bias: bool = False,
) -> ModelBundle:
    """Add i.i.d. ``N(0, (Ω·σ_l)²)`` noise to the weights of ``layer``.

    ``σ_l`` is the population standard deviation of the layer's weights
    before noise. The same seed always draws the same unit-normal field, so
    sweeps over Ω perturb along a single direction.

    Args:
        bundle: Model to perturb (not modified)
        layer: Layer index, or None for every layer
        omega: Noise scale, ``>= 0``
        seed: 64-bit seed
        scale_mode: ``"std"`` or ``"variance"`` reading of the scale
        include_bias: Also perturb the layer bias with the same std

    Returns:
        Perturbed bundle
    """
    if omega < 0:
        raise ValidationError(f"noise scale must be >= 0, got {omega}")
    if scale_mode not in NOISE_SCALE_MODES:
        raise ValidationError(f"unknown noise scale mode {scale_mode!r}")
    if omega == 0:
        return bundle.copy()
    rng = rng_for(seed, STREAM_NOISE)
    updates: Dict[str, np.ndarray] = {}
    for index in _targets(bundle, layer):
        weight = bundle.weight(index).astype(np.float64)
        std = noise_std(float(weight.std()), omega, scale_mode)
        updates[tensor_name(index, "weight")] = weight + std * rng.standard_normal(weight.shape)
        bias = bundle.part(index, "bias")
        if include_bias and bias is not None:
            updates[tensor_name(index, "bias")] = bias.astype(np.float64) + std * rng.standard_normal(bias.shape)
    return bundle.with_tensors(updates)


# ╭──────────────────────────────────────────────────────╮
# │  🔢 Quantization                                      │
# ╰──────────────────────────────────────────────────────╯


def quantization_step(max_abs: float, bits: int) -> float:
    """Symmetric uniform step ``max|w| / (2^(B-1) - 1)``; ``max|w|`` for B = 1."""
    levels = 2 ** (bits - 1) - 1
    return max_abs / levels if levels > 0 else max_abs


def quantize(bundle: ModelBundle, layer: Optional[int], bits: int) -> ModelBundle:
    """Simulated symmetric quantization of ``layer`` to ``bits`` bits.

    Weights are rounded half away from zero to the nearest multiple of the
    step and stored back as float32. An all-zero layer is left untouched.

    Raises:
        ValidationError: If ``bits`` is not an integer >= 1
    """
    if int(bits) != bits or bits < 1:
        raise ValidationError(f"quantization bits must be an integer >= 1, got {bits}")
    bits = int(bits)
    updates: Dict[str, np.ndarray] = {}
    for index in _targets(bundle, layer):
        weight = bundle.weight(index).astype(np.float64)
        max_abs = float(np.abs(weight).max())
        if max_abs == 0.0:
            logger.info("layer %d is all zero; quantization is a no-op", index)
            continue
        step = quantization_step(max_abs, bits)
        updates[tensor_name(index, "weight")] = round_half_away(weight / step) * step
    return bundle.with_tensors(updates)


# ╭──────────────────────────────────────────────────────╮
# │  ✂️ Magnitude Pruning                                  │
# ╰──────────────────────────────────────────────────────╯


def prune_count(fraction: float, count: int) -> int:
    """Number of weights a fraction ``t`` removes: ``floor(t · count)``."""
    return int(math.floor(fraction * count + 1e-9))


def magnitude_prune(bundle: ModelBundle, layer: Optional[int], fraction: float) -> ModelBundle:
    """Zero the ``floor(t·count)`` smallest-magnitude weights.

    Ties go to the lower flat index. With ``layer=None`` the ranking is
    global across every layer's weights.

    Raises:
        ValidationError: If ``fraction`` is outside [0, 1]
    """
    if not 0.0 <= fraction <= 1.0:
        raise ValidationError(f"pruning fraction must lie in [0, 1], got {fraction}")
    targets = _targets(bundle, layer)
    weights = [bundle.weight(index) for index in targets]
    flat = np.concatenate([w.ravel() for w in weights])
    pruned = prune_count(fraction, flat.size)
    if pruned == 0:
        return bundle.copy()
    order = np.argsort(np.abs(flat), kind="stable")
    flat = flat.copy()
    flat[order[:pruned]] = 0.0

    updates: Dict[str, np.ndarray] = {}
    offset = 0
    for index, weight in zip(targets, weights):
        updates[tensor_name(index, "weight")] = flat[offset : offset + weight.size].reshape(weight.shape)
        offset += weight.size
    return bundle.with_tensors(updates)


# ╭──────────────────────────────────────────────────────╮
# │  ✖️ Scalar-Multiple Attack                            │
# ╰──────────────────────────────────────────────────────╯


def scalar_attack(bundle: ModelBundle, layer: int, neuron: int, k: float) -> ModelBundle:
    """Replace neuron ``neuron`` of ``layer`` by ``(1 + k)`` times itself.

    Its weight vector and bias are scaled so the post-synaptic potential
    becomes ``(1 + k)·z``. Channel scale/shift are left alone.

    Raises:
        ValidationError: If the layer or neuron index is out of range
    """
    check_layer(bundle, layer)
    spec = bundle.layers[layer]
    if not 0 <= neuron < spec.neurons:
        raise ValidationError(f"neuron {neuron} out of range for layer {layer} ({spec.neurons} neurons)")
    if k == -1:
        logger.warning("scalar attack with k = -1 zeroes neuron %d of layer %d", neuron, layer)
    factor = 1.0 + k
    weight = bundle.weight(layer).astype(np.float64)
    index = [slice(None)] * weight.ndim
    index[spec.neuron_axis] = neuron
    weight[tuple(index)] *= factor
    updates = {tensor_name(layer, "weight"): weight}
    bias = bundle.part(layer, "bias")
    if bias is not None:
        bias = bias.astype(np.float64)
        bias[neuron] *= factor
        updates[tensor_name(layer, "bias")] = bias
    return bundle.with_tensors(updates)


# ╭──────────────────────────────────────────────────────╮
# │  🧭 Dispatch                                          │
# ╰──────────────────────────────────────────────────────╯


def apply_perturbation(
    bundle: ModelBundle,
    spec: PerturbationSpec,
    seed: int,
    dataset: Optional[Dataset] = None,
    base_config: Optional[TrainConfig] = None,
    scale_mode: str = "std",
    include_bias: bool = False,
) -> ModelBundle:
    """Apply ``spec`` to ``bundle``.

    Fine-tuning needs the training data and base configuration; when either
    is omitted they are rebuilt from the bundle metadata.
    """
    kind = spec.kind
    if kind is PerturbationKind.GAUSSIAN_NOISE:
        return add_gaussian_noise(bundle, spec.target_layer, spec.value, seed, scale_mode, include_bias)
    if kind is PerturbationKind.QUANTIZE:
        return quantize(bundle, spec.target_layer, int(spec.value))
    if kind is PerturbationKind.MAGNITUDE_PRUNE:
        return magnitude_prune(bundle, spec.target_layer, spec.value)
    if kind is PerturbationKind.SCALAR_MULTIPLE:
        assert spec.target_layer is not None
        return scalar_attack(bundle, spec.target_layer, spec.neuron, spec.value)
    if dataset is None or base_config is None:
        context = training_context(bundle)
        dataset = dataset or context.dataset
        base_config = base_config or context.config
    return fine_tune(bundle, dataset, spec.value, base_config, seed=seed)
