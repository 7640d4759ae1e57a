"""
Container Package - Serialization Boundary 📦

The binary weight container and the JSON artifacts every command reads and
writes.
"""

from .artifacts import (
    load_permutation,
    load_report,
    load_watermark_key,
    save_permutation,
    save_report,
    save_verdict,
    save_watermark_key,
)
from .weights import decode, encode, load, save

__all__ = [
    "decode",
    "encode",
    "load",
    "load_permutation",
    "load_report",
    "load_watermark_key",
    "save",
    "save_permutation",
    "save_report",
    "save_verdict",
    "save_watermark_key",
]
