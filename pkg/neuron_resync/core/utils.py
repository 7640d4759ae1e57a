"""
Utility Functions - Common Operations 🛠️

Seeded random streams, rounding helpers and path handling shared by every
sub-package.
"""

import math
from pathlib import Path
from typing import Union

import numpy as np

from .errors import ValidationError

_SEED_MASK = (1 << 64) - 1

# ╭──────────────────────────────────────────────────────╮
# │  🎲 Random Streams                                   │
# ╰──────────────────────────────────────────────────────╯


def check_seed(seed: int) -> int:
    """Validate a 64-bit unsigned seed."""
    seed = int(seed)
    if seed < 0 or seed > _SEED_MASK:
        raise ValidationError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def rng_for(seed: int, stream: int) -> np.random.Generator:
    """Independent PCG64 generator for ``(seed, stream)``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([check_seed(seed), stream])))


def counter_stream(seed: int, stream: int) -> np.random.Generator:
    """Counter-based Philox generator for ``(seed, stream)``.

    Used for mini-batch shuffling: its state depends only on the key and the
    number of draws, never on what other components consumed.
    """
    key = np.random.SeedSequence([check_seed(seed), stream]).generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


# ╭──────────────────────────────────────────────────────╮
# │  🔢 Arithmetic                                       │
# ╰──────────────────────────────────────────────────────╯


def round_half_up(value: float) -> int:
    """Round a non-negative number to the nearest integer, halves upward."""
    return int(math.floor(value + 0.5))


def round_half_away(values: np.ndarray) -> np.ndarray:
    """Element-wise rounding with halves pushed away from zero."""
    return np.sign(values) * np.floor(np.abs(values) + 0.5)


# ╭──────────────────────────────────────────────────────╮
# │  📂 File Operations                                  │
# ╰──────────────────────────────────────────────────────╯


def ensure_parent(path: Union[str, Path]) -> Path:
    """Create the parent directory of ``path`` if needed and return it as a Path."""
    path_obj = Path(path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)
    return path_obj
