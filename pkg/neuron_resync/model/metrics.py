"""
Task Metric - Top-1 Classification Error 🎯
"""

import numpy as np

from ..core.errors import ShapeError
from ..core.types import Dataset, ModelBundle
from .network import predict


def error_rate(bundle: ModelBundle, dataset: Dataset) -> float:
    """Percentage of misclassified samples.

    Predictions take the argmax over logits; ties resolve to the lowest
    class index.
    """
    if bundle.layers[-1].neurons != dataset.num_classes:
        raise ShapeError(
            f"model emits {bundle.layers[-1].neurons} logits for {dataset.num_classes} classes"
        )
    logits = predict(bundle, dataset.inputs)
    predictions = np.argmax(logits, axis=1)
    return 100.0 * float(np.count_nonzero(predictions != dataset.labels)) / len(dataset)
