"""
Layer Kernels - Per-Layer Forward Math ⚙️

Fully-connected and convolutional pre-activations (im2col), the folded
batch-norm affine and the activations. All kernels take float64 arrays and
run batch-first.
"""

from typing import Optional, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ..core.tensor import matmul
from ..core.types import Activation, LayerSpec


def im2col(x: np.ndarray, spec: LayerSpec) -> Tuple[np.ndarray, Tuple[int, int]]:
    """Unfold ``(n, C, H, W)`` into ``(n·Ho·Wo, C·kh·kw)`` patch rows.

    Patch columns flatten as (channel, kh, kw) row-major, the same order as
    a flattened conv filter.
    """
    windows = sliding_window_view(x, (spec.kernel_h, spec.kernel_w), axis=(2, 3))
    windows = windows[:, :, :: spec.stride, :: spec.stride]
    n, channels, out_h, out_w = windows.shape[:4]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * out_h * out_w, channels * spec.kernel_h * spec.kernel_w)
    return cols, (out_h, out_w)


def col2im(
    dcols: np.ndarray,
    spec: LayerSpec,
    input_shape: Tuple[int, ...],
    out_hw: Tuple[int, int],
) -> np.ndarray:
    """Scatter-add patch gradients back onto an ``(n, C, H, W)`` input."""
    n, channels, height, width = input_shape
    out_h, out_w = out_hw
    patches = dcols.reshape(n, out_h, out_w, channels, spec.kernel_h, spec.kernel_w)
    patches = patches.transpose(0, 3, 1, 2, 4, 5)
    dx = np.zeros((n, channels, height, width), dtype=dcols.dtype)
    span_h = spec.stride * (out_h - 1) + 1
    span_w = spec.stride * (out_w - 1) + 1
    for i in range(spec.kernel_h):
        for j in range(spec.kernel_w):
            dx[:, :, i : i + span_h : spec.stride, j : j + span_w : spec.stride] += patches[:, :, :, :, i, j]
    return dx


def linear_response(
    spec: LayerSpec,
    weight: np.ndarray,
    bias: Optional[np.ndarray],
    x: np.ndarray,
) -> np.ndarray:
    """Weighted sum plus bias, before any channel affine or activation."""
    if spec.is_conv:
        cols, (out_h, out_w) = im2col(x, spec)
        flat = matmul(cols, weight.reshape(spec.out_dim, -1).T)
        response = flat.reshape(x.shape[0], out_h, out_w, spec.out_dim).transpose(0, 3, 1, 2)
        if bias is not None:
            response = response + bias[None, :, None, None]
        return np.ascontiguousarray(response)
    response = matmul(x.reshape(x.shape[0], -1), weight)
    if bias is not None:
        response = response + bias[None, :]
    return response


def channel_affine(
    spec: LayerSpec,
    response: np.ndarray,
    scale: Optional[np.ndarray],
    shift: Optional[np.ndarray],
) -> np.ndarray:
    """Folded batch-norm: ``scale · response + shift`` per output channel."""
    if scale is None or shift is None:
        return response
    if spec.is_conv:
        return response * scale[None, :, None, None] + shift[None, :, None, None]
    return response * scale[None, :] + shift[None, :]


def activate(spec: LayerSpec, z: np.ndarray) -> np.ndarray:
    if spec.activation is Activation.RELU:
        return np.maximum(z, 0.0)
    return z
