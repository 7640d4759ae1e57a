"""
Model Package - Sequential Networks & Data 🧠

Fully-connected and single-path convolutional networks, their forward pass,
the synthetic blob datasets and the top-1 error metric.
"""

from .data import dataset_config, dataset_from_config, make_blobs, make_image_blobs
from .metrics import error_rate
from .network import (
    ForwardPass,
    build_conv,
    build_mlp,
    default_target_layer,
    forward,
    forward_params,
    init_bundle,
    predict,
)
from .views import neuron_vectors

__all__ = [
    "ForwardPass",
    "build_conv",
    "build_mlp",
    "dataset_config",
    "dataset_from_config",
    "default_target_layer",
    "error_rate",
    "forward",
    "forward_params",
    "init_bundle",
    "make_blobs",
    "make_image_blobs",
    "neuron_vectors",
    "predict",
]
