"""
Integrity Package - Scaling Attack Analysis 🛡️

Post-synaptic Gaussian statistics, closed-form and Monte-Carlo KL
divergences of scaled neurons, the Cauchy–Schwarz collinearity test and the
ℓ2-norm verification gate with its correction.
"""

from .divergence import (
    BoundRow,
    kl_gaussian,
    kl_gaussian_perturbed,
    kl_gaussian_scaled,
    kl_relu_positive_part,
    kl_relu_scaled,
    mc_kl_gaussian_scaled,
    mc_kl_relu_scaled,
    relu_bound_report,
)
from .statistics import post_synaptic_stats
from .verification import check_cauchy_schwarz_condition, correct_scaling, verify_integrity

__all__ = [
    "BoundRow",
    "check_cauchy_schwarz_condition",
    "correct_scaling",
    "kl_gaussian",
    "kl_gaussian_perturbed",
    "kl_gaussian_scaled",
    "kl_relu_positive_part",
    "kl_relu_scaled",
    "mc_kl_gaussian_scaled",
    "mc_kl_relu_scaled",
    "post_synaptic_stats",
    "relu_bound_report",
    "verify_integrity",
]
