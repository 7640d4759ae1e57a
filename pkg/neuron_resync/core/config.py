"""
Configuration - System Settings 🎛️

Centralized constants and the optional YAML settings layer used throughout
neuron_resync. Library code reads the module-level defaults; the CLI loads a
``Settings`` object (YAML file + environment) and passes values down.
"""

import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml

from .errors import ValidationError

# ╭──────────────────────────────────────────────────────╮
# │  📦 Container Format                                 │
# ╰──────────────────────────────────────────────────────╯

CONTAINER_MAGIC = b"NWRS"
CONTAINER_VERSION = 1
CONTAINER_ALIGNMENT = 8
CONTAINER_DTYPE = "f32"

# ╭──────────────────────────────────────────────────────╮
# │  🔍 Integrity Thresholds                             │
# ╰──────────────────────────────────────────────────────╯

COSINE_EPS = 1e-4
NORM_EPS = 1e-3
COLLINEAR_EPS = 1e-9

# ╭──────────────────────────────────────────────────────╮
# │  🏋️ Training Defaults (desk-scale reference)          │
# ╰──────────────────────────────────────────────────────╯

DEFAULT_EPOCHS = 50
DEFAULT_LEARNING_RATE = 1e-2
DEFAULT_MOMENTUM = 0.9
DEFAULT_WEIGHT_DECAY = 1e-4
DEFAULT_BATCH_SIZE = 32

MLP_WIDTHS = (8, 32, 32, 4)
CONV_INPUT_SHAPE = (1, 8, 8)
CONV_CHANNELS = 8
CONV_KERNEL = 3
NUM_CLASSES = 4
PER_CLASS = 100
BLOB_RADIUS = 4.0

# ╭──────────────────────────────────────────────────────╮
# │  🔐 Watermark Defaults                               │
# ╰──────────────────────────────────────────────────────╯

WATERMARK_BITS = 64
WATERMARK_STRENGTH = 0.1

# ╭──────────────────────────────────────────────────────╮
# │  🎲 Random Streams                                   │
# ╰──────────────────────────────────────────────────────╯

# Each consumer mixes its tag into the seed so streams never overlap.
STREAM_INIT = 0x1A17
STREAM_SHUFFLE = 0x5F1E
STREAM_DATA = 0xDA7A
STREAM_NOISE = 0x0153
STREAM_PERMUTE = 0x9E27
STREAM_PROJECTION = 0x7A0B
STREAM_BITS = 0xB175
STREAM_MONTE_CARLO = 0x3C0A

MC_SAMPLES = 2**20

# ╭──────────────────────────────────────────────────────╮
# │  📈 Sweeps                                           │
# ╰──────────────────────────────────────────────────────╯

CSV_HEADER = ("kind", "param", "seed", "psi", "metric")

DEFAULT_GRIDS: Dict[str, List[float]] = {
    "gauss": [0.0, 1.0, 2.0, 7.0, 10.0],
    "finetune": [0.0, 2.0, 6.0, 10.0],
    "quant": [0.0, 16.0, 8.0, 6.0, 4.0, 2.0],
    "prune": [0.0, 0.91, 0.95, 0.98, 0.99],
    "scalar": [0.0, 0.05, 0.1, 0.5],
}

THREADS_ENV = "NWRS_THREADS"
CONFIG_ENV = "NWRS_CONFIG"

# ╭──────────────────────────────────────────────────────╮
# │  🧩 Runtime Settings                                 │
# ╰──────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class Settings:
    """Operator-tunable knobs, loaded from YAML and the environment."""

    cosine_eps: float = COSINE_EPS
    norm_eps: float = NORM_EPS
    noise_scale: str = "std"
    noise_include_bias: bool = False
    resync_method: str = "greedy"
    threads: Optional[int] = None
    mc_samples: int = MC_SAMPLES
    mc_sampler: str = "sobol"

    def __post_init__(self) -> None:
        if self.cosine_eps <= 0 or self.norm_eps <= 0:
            raise ValidationError("integrity thresholds must be positive")
        if self.noise_scale not in ("std", "variance"):
            raise ValidationError(f"noise_scale must be 'std' or 'variance', got {self.noise_scale!r}")
        if self.resync_method not in ("greedy", "exact", "rowargmax"):
            raise ValidationError(f"unknown resync_method {self.resync_method!r}")
        if self.threads is not None and self.threads < 1:
            raise ValidationError("threads must be at least 1")
        if self.mc_samples < 1:
            raise ValidationError("mc_samples must be at least 1")
        if self.mc_sampler not in ("sobol", "pseudo"):
            raise ValidationError(f"mc_sampler must be 'sobol' or 'pseudo', got {self.mc_sampler!r}")


_SETTING_TYPES: Dict[str, Tuple[type, ...]] = {
    "cosine_eps": (int, float),
    "norm_eps": (int, float),
    "noise_scale": (str,),
    "noise_include_bias": (bool,),
    "resync_method": (str,),
    "threads": (int, type(None)),
    "mc_samples": (int,),
    "mc_sampler": (str,),
}


def _check_type(name: str, value: Any) -> Any:
    """Reject YAML values of the wrong type before ``Settings`` compares them."""
    expected = _SETTING_TYPES[name]
    if isinstance(value, bool) and bool not in expected:
        raise ValidationError(f"{name} must not be a boolean, got {value!r}")
    if not isinstance(value, expected):
        names = " or ".join("null" if t is type(None) else t.__name__ for t in expected)
        raise ValidationError(f"{name} must be {names}, got {value!r}")
    return float(value) if float in expected else value


def load_settings(
    path: Optional[Union[str, Path]] = None,
    environ: Optional[Dict[str, str]] = None,
) -> Settings:
    """Build ``Settings`` from an optional YAML file plus environment overrides.

    Args:
        path: YAML file; falls back to ``$NWRS_CONFIG`` when omitted
        environ: Environment mapping (defaults to ``os.environ``)

    Returns:
        Validated settings

    Raises:
        ValidationError: On unknown keys or out-of-range values
    """
    env = os.environ if environ is None else environ
    source = path or env.get(CONFIG_ENV)
    values: Dict[str, Any] = {}
    if source:
        try:
            loaded = yaml.safe_load(Path(source).read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            detail = " ".join(str(exc).split())
            raise ValidationError(f"{source}: invalid YAML ({detail})") from exc
        if not isinstance(loaded, dict):
            raise ValidationError(f"{source}: top level must be a mapping")
        values.update(loaded)

    known = {f.name for f in dataclasses.fields(Settings)}
    unknown = sorted(str(key) for key in set(values) - known)
    if unknown:
        raise ValidationError(f"unknown settings: {', '.join(unknown)}")

    threads = env.get(THREADS_ENV)
    if threads:
        try:
            values["threads"] = int(threads)
        except ValueError as exc:
            raise ValidationError(f"{THREADS_ENV} must be an integer, got {threads!r}") from exc

    return Settings(**{name: _check_type(name, value) for name, value in values.items()})
