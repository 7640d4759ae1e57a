"""
Synthetic Data - Gaussian Blobs 🫧

Deterministic desk-scale classification sets: unit-variance Gaussian clusters
centred on the vertices of a simplex.
"""

import math
from typing import Any, Dict, Tuple

import numpy as np

from ..core.config import BLOB_RADIUS, STREAM_DATA
from ..core.errors import ValidationError
from ..core.types import Dataset
from ..core.utils import rng_for


def blob_centers(num_classes: int, dim: int, radius: float = BLOB_RADIUS) -> np.ndarray:
    """Class means, one row per class.

    With ``dim >= num_classes`` the means are ``radius · e_c`` (a regular
    simplex). Smaller ``dim`` falls back to a circle in the first two
    coordinates, or a line for ``dim == 1``, spread so that every pair of
    means stays at least ``radius·√2`` apart, the simplex spacing.
    """
    spacing = radius * math.sqrt(2.0)
    centers = np.zeros((num_classes, dim), dtype=np.float64)
    if dim >= num_classes:
        centers[np.arange(num_classes), np.arange(num_classes)] = radius
    elif dim >= 2:
        circle = max(radius, spacing / (2.0 * math.sin(math.pi / num_classes)))
        angles = 2.0 * np.pi * np.arange(num_classes) / num_classes
        centers[:, 0] = circle * np.cos(angles)
        centers[:, 1] = circle * np.sin(angles)
    else:
        centers[:, 0] = spacing * (np.arange(num_classes) - (num_classes - 1) / 2.0)
    return centers


def make_blobs(
    seed: int,
    num_classes: int,
    per_class: int,
    dim: int,
    radius: float = BLOB_RADIUS,
) -> Dataset:
    """Generate ``num_classes · per_class`` labelled samples in ``dim`` dimensions.

    Samples are grouped by class; training shuffles them itself.

    Raises:
        ValidationError: If any size is not positive
    """
    if min(num_classes, per_class, dim) <= 0:
        raise ValidationError("num_classes, per_class and dim must be positive")
    rng = rng_for(seed, STREAM_DATA)
    centers = blob_centers(num_classes, dim, radius)
    labels = np.repeat(np.arange(num_classes, dtype=np.int64), per_class)
    noise = rng.standard_normal((labels.size, dim))
    inputs = (centers[labels] + noise).astype(np.float32)
    return Dataset(inputs=inputs, labels=labels, num_classes=num_classes, name="blobs")


def make_image_blobs(
    seed: int,
    num_classes: int,
    per_class: int,
    shape: Tuple[int, int, int],
    radius: float = BLOB_RADIUS,
) -> Dataset:
    """Blobs in ``prod(shape)`` dimensions reshaped to images."""
    flat = make_blobs(seed, num_classes, per_class, int(np.prod(shape)), radius)
    inputs = flat.inputs.reshape((len(flat),) + tuple(shape))
    return Dataset(inputs=inputs, labels=flat.labels, num_classes=num_classes, name="image-blobs")


def dataset_config(
    seed: int, num_classes: int, per_class: int, shape: Tuple[int, ...]
) -> Dict[str, Any]:
    """Metadata needed to regenerate a dataset later."""
    return {"seed": int(seed), "num_classes": num_classes, "per_class": per_class, "shape": list(shape)}


def dataset_from_config(config: Dict[str, Any]) -> Dataset:
    """Rebuild the dataset described by :func:`dataset_config`."""
    try:
        shape = tuple(int(d) for d in config["shape"])
        args = (int(config["seed"]), int(config["num_classes"]), int(config["per_class"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"incomplete dataset metadata: {config!r}") from exc
    if len(shape) == 1:
        return make_blobs(*args, shape[0])
    return make_image_blobs(*args, shape)  # type: ignore[arg-type]
