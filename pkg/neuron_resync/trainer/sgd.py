"""
SGD Trainer - Deterministic Mini-Batch Optimization 🏋️

Momentum SGD with weight decay over the analytic gradients, a fine-tuning
entry point for the Θ perturbation, and a hook for additive regularizers such
as the projection watermark.
"""

import logging
import math
from typing import Dict, List, Mapping, NamedTuple, Optional, Protocol, Tuple

import numpy as np

from ..core.config import STREAM_SHUFFLE
from ..core.errors import ShapeError, TrainingDivergedError, ValidationError
from ..core.types import Dataset, ModelBundle, TrainConfig
from ..core.utils import counter_stream, round_half_up
from .backprop import Gradients, loss_and_gradients

logger = logging.getLogger(__name__)


class RegularizerHook(Protocol):
    """Additive training penalty with its own gradient."""

    def penalty(self, params: Mapping[str, np.ndarray]) -> Tuple[float, Gradients]:
        ...


class TrainResult(NamedTuple):
    model: ModelBundle
    losses: List[float]


# ╭──────────────────────────────────────────────────────╮
# │  ⚙️ Optimizer                                         │
# ╰──────────────────────────────────────────────────────╯


class SGD:
    """Momentum SGD, PyTorch convention.

    ``g ← grad + λ·w``; ``v ← μ·v + g`` (``v = g`` on the first step);
    ``w ← w − lr·v``. Buffers start empty, so a fresh optimizer always has
    zero momentum.
    """

    def __init__(self, learning_rate: float, momentum: float = 0.0, weight_decay: float = 0.0):
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.buffers: Dict[str, np.ndarray] = {}

    def step(self, params: Dict[str, np.ndarray], grads: Gradients) -> None:
        """Update ``params`` in place from ``grads``."""
        for name, grad in grads.items():
            update = grad + self.weight_decay * params[name] if self.weight_decay else grad
            if self.momentum:
                buffer = self.buffers.get(name)
                if buffer is None:
                    buffer = np.array(update, dtype=np.float64)
                else:
                    buffer = self.momentum * buffer + update
                self.buffers[name] = buffer
                update = buffer
            params[name] -= self.learning_rate * update


# ╭──────────────────────────────────────────────────────╮
# │  🔁 Training Loops                                    │
# ╰──────────────────────────────────────────────────────╯


def train(bundle: ModelBundle, dataset: Dataset, config: TrainConfig) -> TrainResult:
    """Train every tensor of ``bundle`` on ``dataset`` with cross-entropy SGD.

    Shuffling draws from a counter-based stream keyed by ``config.seed`` so
    identical seeds give bit-identical weights.

    Args:
        bundle: Model to start from (not modified)
        dataset: Training samples
        config: Hyper-parameters; ``watermark_hook`` adds its penalty

    Returns:
        Trained bundle and the mean loss of every epoch

    Raises:
        ShapeError: If the dataset does not fit the model
        TrainingDivergedError: If the loss becomes non-finite
    """
    if dataset.sample_shape != bundle.input_shape:
        raise ShapeError(f"dataset samples {dataset.sample_shape} do not fit model input {bundle.input_shape}")
    if bundle.layers[-1].neurons != dataset.num_classes:
        raise ShapeError("model output width must equal the number of classes")
    if config.epochs == 0:
        return TrainResult(bundle.copy(), [])

    params = {name: np.array(value, dtype=np.float64) for name, value in bundle.weights.items()}
    optimizer = SGD(config.learning_rate, config.momentum, config.weight_decay)
    shuffle = counter_stream(config.seed, STREAM_SHUFFLE)
    hook: Optional[RegularizerHook] = config.watermark_hook
    inputs = np.asarray(dataset.inputs, dtype=np.float64)
    labels = dataset.labels
    n = len(dataset)
    history: List[float] = []

    for epoch in range(config.epochs):
        order = shuffle.permutation(n)
        total = 0.0
        for step, start in enumerate(range(0, n, config.batch_size)):
            batch = order[start : start + config.batch_size]
            loss, grads = loss_and_gradients(bundle.layers, params, inputs[batch], labels[batch])
            if hook is not None:
                penalty, extra = hook.penalty(params)
                loss += penalty
                for name, grad in extra.items():
                    grads[name] = grads[name] + grad
            if not math.isfinite(loss):
                raise TrainingDivergedError(
                    f"non-finite loss {loss} at epoch {epoch} step {step} (lr={config.learning_rate})"
                )
            optimizer.step(params, grads)
            total += loss * len(batch)
        history.append(total / n)
        logger.debug("epoch %d/%d loss %.6f", epoch + 1, config.epochs, history[-1])

    updates = {name: value.astype(np.float32) for name, value in params.items()}
    return TrainResult(bundle.with_tensors(updates), history)


def fine_tune_epochs(theta: float, base_epochs: int) -> int:
    """Extra epochs for a fine-tuning ratio Θ (percent of the base epoch count)."""
    return round_half_up(theta / 100.0 * base_epochs)


def fine_tune(
    bundle: ModelBundle,
    dataset: Dataset,
    theta: float,
    base_config: TrainConfig,
    seed: Optional[int] = None,
) -> ModelBundle:
    """Resume training for ``round(Θ/100 · base epochs)`` epochs.

    The whole model is tuned with fresh momentum buffers and no regularizer
    hook.

    Raises:
        ValidationError: If ``theta`` is negative
    """
    if theta < 0:
        raise ValidationError(f"fine-tuning ratio must be >= 0, got {theta}")
    extra = fine_tune_epochs(theta, base_config.epochs)
    if extra == 0:
        return bundle.copy()
    config = base_config.with_(
        epochs=extra,
        seed=base_config.seed if seed is None else seed,
        watermark_hook=None,
    )
    logger.info("fine-tuning for %d epochs (theta=%s%%)", extra, theta)
    return train(bundle, dataset, config).model
