"""
Permutation Attack - Function-Preserving Neuron Shuffles 🔀

Reorders the neurons of one layer together with their per-neuron parameters
and applies the compensating reorder to the next layer's input channels, so
the network computes exactly the same function with scrambled parameters.
"""

import logging

import numpy as np

from ..core.config import STREAM_PERMUTE
from ..core.errors import PermutationError, ValidationError
from ..core.permutation import Permutation, check_size, inverse
from ..core.types import ModelBundle, tensor_name
from ..core.utils import rng_for

logger = logging.getLogger(__name__)

PER_NEURON_PARTS = ("bias", "scale", "shift")


def check_layer(bundle: ModelBundle, layer: int) -> int:
    """Validate a layer index against ``bundle``."""
    if not 0 <= layer < bundle.depth:
        raise ValidationError(f"layer {layer} out of range for a {bundle.depth}-layer model")
    return layer


def random_permutation(size: int, seed: int) -> Permutation:
    """Uniform random permutation drawn from the permutation stream of ``seed``."""
    return Permutation.random(size, rng_for(seed, STREAM_PERMUTE))


def follower_rows(bundle: ModelBundle, layer: int, order: np.ndarray) -> np.ndarray:
    """Input indices of layer ``layer + 1`` that follow the neuron ``order``.

    A conv layer feeding a flattening FC layer owns a contiguous block of
    ``M`` rows per channel, where ``M`` is the conv output's spatial size.
    """
    spec = bundle.layers[layer]
    follower = bundle.layers[layer + 1]
    if follower.is_conv or not spec.is_conv:
        return order
    _, out_shape = bundle.layer_shapes()[layer]
    block = int(np.prod(out_shape[1:]))
    return (order[:, None] * block + np.arange(block)[None, :]).ravel()


def permute_layer(
    bundle: ModelBundle,
    layer: int,
    perm: Permutation,
    allow_output_relabel: bool = False,
) -> ModelBundle:
    """Move neuron ``i`` of ``layer`` to position ``perm[i]``.

    Layer ``layer`` weights become ``w · P`` with bias, scale and shift
    reordered identically; the input axis of layer ``layer + 1`` is reordered
    by the same permutation. Values are moved, never recomputed.

    Args:
        bundle: Model to permute (not modified)
        layer: Layer index
        perm: Permutation of size ``N_layer``
        allow_output_relabel: Permit permuting the output layer, which
            relabels the classes

    Returns:
        Permuted bundle

    Raises:
        ValidationError: If ``layer`` is out of range
        PermutationError: On a size mismatch or a forbidden output permutation
    """
    check_layer(bundle, layer)
    spec = bundle.layers[layer]
    check_size(perm, spec.neurons, f"layer {layer}")
    last = layer == bundle.depth - 1
    if last and not allow_output_relabel:
        raise PermutationError("permuting the output layer relabels classes; pass allow_output_relabel")

    order = inverse(perm).as_array()
    updates = {
        tensor_name(layer, "weight"): np.take(bundle.weight(layer), order, axis=spec.neuron_axis),
    }
    for part in PER_NEURON_PARTS:
        values = bundle.part(layer, part)
        if values is not None:
            updates[tensor_name(layer, part)] = np.take(values, order)
    if not last:
        follower = bundle.layers[layer + 1]
        rows = follower_rows(bundle, layer, order)
        updates[tensor_name(layer + 1, "weight")] = np.take(bundle.weight(layer + 1), rows, axis=follower.input_axis)
    logger.debug("permuted layer %d (%d neurons)", layer, spec.neurons)
    return bundle.with_tensors(updates)
