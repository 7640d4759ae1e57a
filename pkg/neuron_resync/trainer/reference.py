"""
Reference Setup - Desk-Scale Model & Data 🧪

The trained reference models every experiment starts from, plus helpers to
recover their training context from bundle metadata.
"""

from typing import NamedTuple, Optional

from ..core.config import CONV_INPUT_SHAPE, DEFAULT_EPOCHS, MLP_WIDTHS, NUM_CLASSES, PER_CLASS
from ..core.errors import ValidationError
from ..core.types import Dataset, ModelBundle, TrainConfig
from ..model.data import dataset_config, dataset_from_config
from ..model.network import build_conv, build_mlp
from .sgd import train


class ReferenceSetup(NamedTuple):
    model: ModelBundle
    dataset: Dataset
    config: TrainConfig


def untrained_setup(seed: int, conv: bool = False, epochs: int = DEFAULT_EPOCHS) -> ReferenceSetup:
    """Freshly initialized reference model, its dataset and training config.

    The dataset recipe and training configuration are already recorded in
    the bundle metadata so later fine-tuning can rebuild both.
    """
    shape = CONV_INPUT_SHAPE if conv else (MLP_WIDTHS[0],)
    recipe = dataset_config(seed, NUM_CLASSES, PER_CLASS, shape)
    model = build_conv(seed) if conv else build_mlp(seed)
    config = TrainConfig(epochs=epochs, seed=seed)
    model.metadata["dataset"] = recipe
    model.metadata["training"] = config.to_dict()
    return ReferenceSetup(model, dataset_from_config(recipe), config)


def reference_setup(seed: int, conv: bool = False, epochs: int = DEFAULT_EPOCHS) -> ReferenceSetup:
    """Train the MLP (or conv) reference on its blob dataset."""
    initial = untrained_setup(seed, conv, epochs)
    trained = train(initial.model, initial.dataset, initial.config).model
    return initial._replace(model=trained)


def training_context(bundle: ModelBundle, seed: Optional[int] = None) -> ReferenceSetup:
    """Dataset and training configuration recorded in ``bundle`` metadata.

    Raises:
        ValidationError: If the bundle carries no training record
    """
    recipe = bundle.metadata.get("dataset")
    training = bundle.metadata.get("training")
    if not isinstance(recipe, dict) or not isinstance(training, dict):
        raise ValidationError("model metadata lacks the dataset/training record needed for fine-tuning")
    config = TrainConfig.from_dict(training)
    if seed is not None:
        config = config.with_(seed=seed)
    return ReferenceSetup(bundle, dataset_from_config(recipe), config)
