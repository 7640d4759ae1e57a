"""
Trainer Package - Backprop & SGD 🏋️

Analytic gradients for sequential FC/conv networks, momentum SGD training,
fine-tuning and the reference training recipe.
"""

from .backprop import gradient_check, loss_and_gradients, softmax_cross_entropy
from .reference import ReferenceSetup, reference_setup, training_context, untrained_setup
from .sgd import SGD, TrainResult, fine_tune, fine_tune_epochs, train

__all__ = [
    "ReferenceSetup",
    "SGD",
    "TrainResult",
    "fine_tune",
    "fine_tune_epochs",
    "gradient_check",
    "loss_and_gradients",
    "reference_setup",
    "softmax_cross_entropy",
    "train",
    "training_context",
    "untrained_setup",
]
