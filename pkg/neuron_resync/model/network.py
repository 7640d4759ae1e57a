"""
Sequential Network - Forward Propagation 🧠

Builds the desk-scale reference models and runs the layer-by-layer forward
pass ``y_l = φ(<w_l, y_{l-1}>)``, keeping every intermediate so analysis and
backpropagation can reuse them.
"""

from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..core.config import CONV_CHANNELS, CONV_INPUT_SHAPE, CONV_KERNEL, MLP_WIDTHS, NUM_CLASSES, STREAM_INIT
from ..core.errors import ShapeError
from ..core.types import Activation, LayerKind, LayerSpec, ModelBundle, tensor_name
from ..core.utils import rng_for
from .layers import activate, channel_affine, linear_response

# ╭──────────────────────────────────────────────────────╮
# │  ➡️ Forward Pass                                      │
# ╰──────────────────────────────────────────────────────╯


class ForwardPass(NamedTuple):
    """Everything the forward pass touched, one entry per layer.

    ``inputs[l]`` is the tensor fed to layer ``l``, ``responses[l]`` the
    weighted sum plus bias, ``pre_activations[l]`` the post-synaptic
    potential after the channel affine and ``activations[l]`` the output.
    """

    inputs: List[np.ndarray]
    responses: List[np.ndarray]
    pre_activations: List[np.ndarray]
    activations: List[np.ndarray]

    @property
    def output(self) -> np.ndarray:
        return self.activations[-1]


def forward_params(
    layers: Sequence[LayerSpec],
    params: Mapping[str, np.ndarray],
    x: np.ndarray,
) -> ForwardPass:
    """Forward a batch through ``layers`` using the raw parameter mapping.

    Parameters may be float32 or float64; computation is float64 throughout.
    """
    current = np.asarray(x, dtype=np.float64)
    inputs, responses, pres, posts = [], [], [], []
    for index, spec in enumerate(layers):
        weight = np.asarray(params[tensor_name(index, "weight")], dtype=np.float64)
        bias = _optional(params, index, "bias")
        scale = _optional(params, index, "scale")
        shift = _optional(params, index, "shift")
        if not spec.is_conv and current.ndim > 2:
            current = current.reshape(current.shape[0], -1)
        inputs.append(current)
        response = linear_response(spec, weight, bias, current)
        z = channel_affine(spec, response, scale, shift)
        y = activate(spec, z)
        responses.append(response)
        pres.append(z)
        posts.append(y)
        current = y
    return ForwardPass(inputs, responses, pres, posts)


def _optional(params: Mapping[str, np.ndarray], index: int, part: str) -> Optional[np.ndarray]:
    value = params.get(tensor_name(index, part))
    return None if value is None else np.asarray(value, dtype=np.float64)


def forward(bundle: ModelBundle, x: np.ndarray) -> ForwardPass:
    """Forward a batch (or a single sample) through ``bundle``.

    A single sample shaped like ``bundle.input_shape`` is promoted to a batch
    of one and every returned tensor is squeezed back.

    Raises:
        ShapeError: If ``x`` does not match the model input shape
    """
    x = np.asarray(x, dtype=np.float64)
    single = tuple(x.shape) == bundle.input_shape
    if single:
        x = x[None]
    if tuple(x.shape[1:]) != bundle.input_shape:
        raise ShapeError(f"input shape {x.shape[1:]} does not match model input {bundle.input_shape}")
    result = forward_params(bundle.layers, bundle.weights, x)
    if not single:
        return result
    return ForwardPass(*([t[0] for t in group] for group in result))


def predict(bundle: ModelBundle, x: np.ndarray) -> np.ndarray:
    """Final logits for a batch."""
    return forward(bundle, x).output


# ╭──────────────────────────────────────────────────────╮
# │  🏗️ Reference Builders                                │
# ╰──────────────────────────────────────────────────────╯


def init_bundle(
    layers: List[LayerSpec],
    input_shape: Tuple[int, ...],
    seed: int,
    metadata: Optional[Dict[str, object]] = None,
) -> ModelBundle:
    """He-initialized weights, zero biases, unit scales for ``layers``."""
    rng = rng_for(seed, STREAM_INIT)
    weights: Dict[str, np.ndarray] = {}
    for index, spec in enumerate(layers):
        fan_in = spec.in_dim * spec.kernel_h * spec.kernel_w
        gain = 2.0 if spec.activation is Activation.RELU else 1.0
        std = np.sqrt(gain / fan_in)
        weights[tensor_name(index, "weight")] = (rng.standard_normal(spec.weight_shape) * std).astype(np.float32)
        if spec.has_bias:
            weights[tensor_name(index, "bias")] = np.zeros(spec.neurons, dtype=np.float32)
        if spec.has_channel_scale:
            weights[tensor_name(index, "scale")] = np.ones(spec.neurons, dtype=np.float32)
            weights[tensor_name(index, "shift")] = np.zeros(spec.neurons, dtype=np.float32)
    bundle = ModelBundle(layers, weights, input_shape, dict(metadata or {}))
    bundle.metadata.setdefault("seed", int(seed))
    return bundle.validate()


def build_mlp(
    seed: int,
    widths: Sequence[int] = MLP_WIDTHS,
    bias: bool = True,
    channel_scale: bool = False,
) -> ModelBundle:
    """Fully-connected ReLU network, 8→32→32→4 by default."""
    if len(widths) < 2:
        raise ShapeError("an MLP needs at least input and output widths")
    layers = []
    for index, (fan_in, fan_out) in enumerate(zip(widths[:-1], widths[1:])):
        last = index == len(widths) - 2
        layers.append(
            LayerSpec(
                kind=LayerKind.FULLY_CONNECTED,
                in_dim=int(fan_in),
                out_dim=int(fan_out),
                activation=Activation.IDENTITY if last else Activation.RELU,
                has_bias=bias,
                has_channel_scale=channel_scale and not last,
            )
        )
    return init_bundle(layers, (int(widths[0]),), seed, {"architecture": "mlp"})


def build_conv(
    seed: int,
    input_shape: Tuple[int, int, int] = CONV_INPUT_SHAPE,
    channels: int = CONV_CHANNELS,
    kernel: int = CONV_KERNEL,
    num_classes: int = NUM_CLASSES,
    channel_scale: bool = False,
) -> ModelBundle:
    """Conv(1→8, 3×3) → Conv(8→8, 3×3) → flatten → FC→classes."""
    in_channels, height, width = input_shape
    first = LayerSpec(
        LayerKind.CONV2D, in_channels, channels, Activation.RELU, True, channel_scale, kernel, kernel
    )
    second = LayerSpec(LayerKind.CONV2D, channels, channels, Activation.RELU, True, channel_scale, kernel, kernel)
    flat = channels * (height - 2 * (kernel - 1)) * (width - 2 * (kernel - 1))
    head = LayerSpec(LayerKind.FULLY_CONNECTED, flat, num_classes, Activation.IDENTITY, True, False)
    return init_bundle([first, second, head], tuple(input_shape), seed, {"architecture": "conv"})


def default_target_layer(bundle: ModelBundle) -> int:
    """Layer L−2: the penultimate layer, the last one that can be permuted."""
    return max(bundle.depth - 2, 0)
