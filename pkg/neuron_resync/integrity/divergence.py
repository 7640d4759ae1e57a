"""
Divergence - KL Impact of Weight Modifications 📉

Closed-form KL divergences between a neuron's original and modified
post-synaptic distributions, their ReLU counterparts, and Monte-Carlo
oracles that check every closed form against sampling.

The stated ReLU closed form equals four times the integral over the
positive half-line; ``kl_relu_scaled`` returns that closed form and
``kl_relu_positive_part`` the exact integral.
"""

import math
from typing import List, NamedTuple, Sequence

import numpy as np
from scipy.stats import norm, qmc

from ..core.config import MC_SAMPLES, STREAM_MONTE_CARLO
from ..core.errors import DomainError
from ..core.types import InputGaussianSpec
from ..core.utils import rng_for
from .statistics import post_synaptic_stats

_UNIT_CLIP = 1e-15

# ╭──────────────────────────────────────────────────────╮
# │  📐 Closed Forms                                      │
# ╰──────────────────────────────────────────────────────╯


def _check_k(k: float) -> float:
    if not k > -1.0:
        raise DomainError(f"scale factor k must be > -1, got {k} (k = -1 zeroes the neuron)")
    return 1.0 + k


def kl_gaussian(mean_p: float, var_p: float, mean_q: float, var_q: float) -> float:
    """``KL(N(μp, σp²) ‖ N(μq, σq²))``.

    Raises:
        DomainError: If either variance is not positive
    """
    if var_p <= 0 or var_q <= 0:
        raise DomainError("Gaussian KL needs positive variances")
    return 0.5 * (math.log(var_q / var_p) + (var_p + (mean_p - mean_q) ** 2) / var_q - 1.0)


def kl_gaussian_scaled(k: float, mu_z: float, sigma_z: float) -> float:
    """KL between ``z ~ N(μz, σz²)`` and its scaled copy ``(1+k)·z``.

    ``log(1+k) + (σz² + k²μz²) / (2(1+k)²σz²) − 1/2``

    Raises:
        DomainError: If ``k <= -1`` or ``sigma_z <= 0``
    """
    scale = _check_k(k)
    if not sigma_z > 0:
        raise DomainError(f"sigma_z must be > 0, got {sigma_z}")
    variance = sigma_z * sigma_z
    return math.log(scale) + (variance + k * k * mu_z * mu_z) / (2.0 * scale * scale * variance) - 0.5


def kl_relu_scaled(k: float) -> float:
    """Closed-form ReLU KL for ``μz = 0``: ``[2(k+1)² log(k+1) − k(k+2)] / (k+1)²``."""
    scale = _check_k(k)
    return (2.0 * scale * scale * math.log(scale) - k * (k + 2.0)) / (scale * scale)


def kl_relu_positive_part(k: float) -> float:
    """Exact KL between ``ReLU(z)`` and ``ReLU((1+k)z)`` for ``z ~ N(0, σ²)``.

    Both outputs put mass 1/2 at zero, which cancels; the positive half
    contributes ``log(1+k)/2 + 1/(4(1+k)²) − 1/4``.
    """
    return kl_relu_scaled(k) / 4.0


def kl_gaussian_perturbed(weights: np.ndarray, modified: np.ndarray, gaussian: InputGaussianSpec) -> float:
    """KL between the post-synaptic potentials of ``weights`` and ``modified``.

    General modification ``w̃ = w + ŵ``; the scaled case reduces to
    :func:`kl_gaussian_scaled`.
    """
    mean, variance = post_synaptic_stats(weights, gaussian)
    mean_t, variance_t = post_synaptic_stats(modified, gaussian)
    return kl_gaussian(mean, variance, mean_t, variance_t)


# ╭──────────────────────────────────────────────────────╮
# │  🎲 Monte-Carlo Oracles                               │
# ╰──────────────────────────────────────────────────────╯


def standard_normal_samples(samples: int, seed: int, sampler: str = "sobol") -> np.ndarray:
    """Standard-normal draws from scrambled Sobol points or a pseudo-random stream."""
    rng = rng_for(seed, STREAM_MONTE_CARLO)
    if sampler == "pseudo":
        return rng.standard_normal(samples)
    if sampler != "sobol":
        raise DomainError(f"unknown sampler {sampler!r}")
    engine = qmc.Sobol(d=1, scramble=True, seed=rng)
    if samples & (samples - 1) == 0:
        points = engine.random_base2(int(math.log2(samples)))
    else:
        points = engine.random(samples)
    return norm.ppf(np.clip(points[:, 0], _UNIT_CLIP, 1.0 - _UNIT_CLIP))


def mc_kl_gaussian_scaled(
    k: float,
    mu_z: float,
    sigma_z: float,
    samples: int = MC_SAMPLES,
    seed: int = 0,
    sampler: str = "sobol",
) -> float:
    """Sample mean of ``log p(z) − log q(z)`` with ``z ~ p = N(μz, σz²)``."""
    scale = _check_k(k)
    z = mu_z + sigma_z * standard_normal_samples(samples, seed, sampler)
    log_p = norm.logpdf(z, loc=mu_z, scale=sigma_z)
    log_q = norm.logpdf(z, loc=scale * mu_z, scale=scale * sigma_z)
    return float(np.mean(log_p - log_q))


def mc_kl_relu_scaled(k: float, samples: int = MC_SAMPLES, seed: int = 0, sampler: str = "sobol") -> float:
    """Monte-Carlo estimate of :func:`kl_relu_positive_part`.

    Zero outputs contribute nothing, so only samples with ``z > 0`` enter
    the log-density ratio.
    """
    scale = _check_k(k)
    z = standard_normal_samples(samples, seed, sampler)
    positive = z > 0
    ratio = norm.logpdf(z[positive]) - norm.logpdf(z[positive], scale=scale)
    return float(ratio.sum() / z.size)


# ╭──────────────────────────────────────────────────────╮
# │  ⚖️ Bound Report                                      │
# ╰──────────────────────────────────────────────────────╯


class BoundRow(NamedTuple):
    """Gaussian KL at ``μz = 0`` against both ReLU expressions for one ``k``."""

    k: float
    gaussian: float
    relu_exact: float
    relu_closed_form: float

    @property
    def exact_bounded(self) -> bool:
        return self.relu_exact <= self.gaussian + 1e-12

    @property
    def closed_form_bounded(self) -> bool:
        return self.relu_closed_form <= self.gaussian + 1e-12


def relu_bound_report(ks: Sequence[float]) -> List[BoundRow]:
    """Check numerically whether the Gaussian KL upper-bounds the ReLU KL."""
    return [
        BoundRow(float(k), kl_gaussian_scaled(k, 0.0, 1.0), kl_relu_positive_part(k), kl_relu_scaled(k))
        for k in ks
    ]
