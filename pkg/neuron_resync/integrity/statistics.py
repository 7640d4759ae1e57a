"""
Post-Synaptic Statistics - Gaussian Moments of z 📊
"""

from typing import Tuple

import numpy as np

from ..core.errors import ShapeError, ValidationError
from ..core.types import InputGaussianSpec

SYMMETRY_TOL = 1e-9
PSD_TOL = 1e-9


def check_covariance(covariance: np.ndarray) -> None:
    """Raise ``ValidationError`` unless ``covariance`` is symmetric PSD within tolerance."""
    if np.max(np.abs(covariance - covariance.T), initial=0.0) > SYMMETRY_TOL:
        raise ValidationError("covariance is not symmetric")
    if np.linalg.eigvalsh(covariance).min() < -PSD_TOL:
        raise ValidationError("covariance is not positive semi-definite")


def post_synaptic_stats(weights: np.ndarray, gaussian: InputGaussianSpec) -> Tuple[float, float]:
    """Mean and variance of ``z = w·x`` for ``x ~ N(μ, Σ)``.

    Returns:
        Tuple of (``w·μ``, ``wᵀΣw``)

    Raises:
        ShapeError: If ``weights`` and the Gaussian differ in dimension
        ValidationError: If the covariance is not symmetric PSD
    """
    w = np.asarray(weights, dtype=np.float64).ravel()
    if w.size != gaussian.dim:
        raise ShapeError(f"weight vector of length {w.size} for a {gaussian.dim}-dimensional input")
    covariance = gaussian.covariance_matrix()
    check_covariance(covariance)
    mean = float(w @ gaussian.mean)
    variance = max(float(w @ covariance @ w), 0.0)
    return mean, variance
