"""
Backpropagation - Analytic Gradients 🔙

Softmax cross-entropy loss and its gradient with respect to every tensor of
a sequential FC/conv network, plus a central-difference checker.
"""

from typing import Dict, Mapping, Sequence, Tuple

import numpy as np

from ..core.tensor import matmul
from ..core.types import Activation, LayerSpec, tensor_name
from ..model.layers import col2im, im2col
from ..model.network import forward_params

Gradients = Dict[str, np.ndarray]


def softmax_cross_entropy(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean cross-entropy and its gradient with respect to ``logits``."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    log_probs = shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))
    n = logits.shape[0]
    loss = -float(log_probs[np.arange(n), labels].mean())
    grad = np.exp(log_probs)
    grad[np.arange(n), labels] -= 1.0
    return loss, grad / n


def loss_and_gradients(
    layers: Sequence[LayerSpec],
    params: Mapping[str, np.ndarray],
    inputs: np.ndarray,
    labels: np.ndarray,
) -> Tuple[float, Gradients]:
    """Forward a mini-batch and backpropagate the cross-entropy loss.

    Args:
        layers: Architecture
        params: Tensor mapping (float64 recommended)
        inputs: Batch of samples
        labels: Integer class labels

    Returns:
        Tuple of (mean loss, gradient per tensor name)
    """
    trace = forward_params(layers, params, inputs)
    loss, grad = softmax_cross_entropy(trace.output, labels)
    grads: Gradients = {}

    for index in range(len(layers) - 1, -1, -1):
        spec = layers[index]
        channel_axes = (0, 2, 3) if spec.is_conv else (0,)
        if spec.activation is Activation.RELU:
            grad = grad * (trace.pre_activations[index] > 0)

        scale = params.get(tensor_name(index, "scale"))
        if scale is not None:
            response = trace.responses[index]
            grads[tensor_name(index, "scale")] = (grad * response).sum(axis=channel_axes)
            grads[tensor_name(index, "shift")] = grad.sum(axis=channel_axes)
            scale64 = np.asarray(scale, dtype=np.float64)
            grad = grad * (scale64[None, :, None, None] if spec.is_conv else scale64[None, :])

        if spec.has_bias:
            grads[tensor_name(index, "bias")] = grad.sum(axis=channel_axes)

        weight = np.asarray(params[tensor_name(index, "weight")], dtype=np.float64)
        layer_input = trace.inputs[index]
        if spec.is_conv:
            cols, out_hw = im2col(layer_input, spec)
            grad_flat = grad.transpose(0, 2, 3, 1).reshape(-1, spec.out_dim)
            grads[tensor_name(index, "weight")] = matmul(grad_flat.T, cols).reshape(spec.weight_shape)
            if index > 0:
                dcols = matmul(grad_flat, weight.reshape(spec.out_dim, -1))
                grad = col2im(dcols, spec, layer_input.shape, out_hw)
        else:
            grads[tensor_name(index, "weight")] = matmul(layer_input.T, grad)
            if index > 0:
                grad = matmul(grad, weight.T)
        if index > 0:
            grad = grad.reshape(trace.activations[index - 1].shape)

    return loss, grads


def gradient_check(
    layers: Sequence[LayerSpec],
    params: Mapping[str, np.ndarray],
    inputs: np.ndarray,
    labels: np.ndarray,
    eps: float = 1e-3,
) -> Dict[str, float]:
    """Compare analytic gradients with central finite differences.

    Returns the norm-wise relative error ``‖a − n‖ / (‖a‖ + ‖n‖)`` per tensor.
    """
    work = {name: np.array(value, dtype=np.float64) for name, value in params.items()}
    _, analytic = loss_and_gradients(layers, work, inputs, labels)
    errors: Dict[str, float] = {}
    for name, tensor in work.items():
        numeric = np.zeros_like(tensor)
        flat = tensor.reshape(-1)
        numeric_flat = numeric.reshape(-1)
        for i in range(flat.size):
            original = flat[i]
            flat[i] = original + eps
            plus, _ = loss_and_gradients(layers, work, inputs, labels)
            flat[i] = original - eps
            minus, _ = loss_and_gradients(layers, work, inputs, labels)
            flat[i] = original
            numeric_flat[i] = (plus - minus) / (2.0 * eps)
        denom = np.linalg.norm(analytic[name]) + np.linalg.norm(numeric)
        errors[name] = 0.0 if denom == 0.0 else float(np.linalg.norm(analytic[name] - numeric) / denom)
    return errors
