"""
Attack Package - Model Alterations ⚔️

The permutation attack and the weight perturbations a re-synchronizer has to
survive: Gaussian noise, fine-tuning, quantization, pruning and the
scalar-multiple integrity attack.
"""

from .permutation import check_layer, permute_layer, random_permutation
from .perturbations import (
    add_gaussian_noise,
    apply_perturbation,
    magnitude_prune,
    quantize,
    scalar_attack,
)

__all__ = [
    "add_gaussian_noise",
    "apply_perturbation",
    "check_layer",
    "magnitude_prune",
    "permute_layer",
    "quantize",
    "random_permutation",
    "scalar_attack",
]
