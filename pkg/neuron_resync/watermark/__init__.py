"""
Watermark Package - Projection Watermarking 🔐

Embedding by regularized training, extraction with Pearson correlation and
bit error rate.
"""

from .projection import (
    WatermarkRegularizer,
    default_record,
    embed,
    extract,
    feature_dim,
    feature_vector,
    pearson,
    projection_matrix,
    random_bits,
)

__all__ = [
    "WatermarkRegularizer",
    "default_record",
    "embed",
    "extract",
    "feature_dim",
    "feature_vector",
    "pearson",
    "projection_matrix",
    "random_bits",
]
