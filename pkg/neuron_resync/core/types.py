"""
Type Definitions - Structural Typing System 📊

Precise definitions of the data structures shared across neuron_resync:
layer specifications, model bundles, datasets, training and perturbation
configurations, and the reports produced by re-synchronization, integrity
checks and sweeps.
"""

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from .config import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_EPOCHS,
    DEFAULT_LEARNING_RATE,
    DEFAULT_MOMENTUM,
    DEFAULT_WEIGHT_DECAY,
)
from .errors import ShapeError, ValidationError
from .permutation import Permutation

# ╭──────────────────────────────────────────────────────╮
# │  🏷️ Enumerations                                      │
# ╰──────────────────────────────────────────────────────╯


class LayerKind(str, Enum):
    FULLY_CONNECTED = "fc"
    CONV2D = "conv"


class Activation(str, Enum):
    RELU = "relu"
    IDENTITY = "identity"


class MatchMethod(str, Enum):
    """How a similarity matrix is turned into a bijection."""

    GREEDY_GLOBAL = "greedy"
    EXACT_ASSIGNMENT = "exact"
    ROW_ARGMAX = "rowargmax"


class PerturbationKind(str, Enum):
    GAUSSIAN_NOISE = "gauss"
    FINE_TUNE = "finetune"
    QUANTIZE = "quant"
    MAGNITUDE_PRUNE = "prune"
    SCALAR_MULTIPLE = "scalar"


class NeuronFlag(str, Enum):
    """Integrity classification of one neuron, ordered by severity."""

    CLEAN = "clean"
    SCALED_NEURON = "scaled"
    MODIFIED = "modified"

    @property
    def severity(self) -> int:
        return {"clean": 0, "scaled": 1, "modified": 2}[self.value]

    @property
    def exit_code(self) -> int:
        return {"clean": 0, "scaled": 2, "modified": 3}[self.value]


class Stage(str, Enum):
    """Where neuron outputs are read: before or after the activation."""

    PRE = "pre"
    POST = "post"


# ╭──────────────────────────────────────────────────────╮
# │  🏗️ Architecture                                      │
# ╰──────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class LayerSpec:
    """One layer of a sequential network.

    For convolutions ``in_dim``/``out_dim`` count channels; the kernel is
    ``kernel_h × kernel_w`` with no padding. ``out_dim`` is the neuron count
    N_l that permutations act on.
    """

    kind: LayerKind
    in_dim: int
    out_dim: int
    activation: Activation = Activation.RELU
    has_bias: bool = True
    has_channel_scale: bool = False
    kernel_h: int = 1
    kernel_w: int = 1
    stride: int = 1

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", LayerKind(self.kind))
        object.__setattr__(self, "activation", Activation(self.activation))
        for name in ("in_dim", "out_dim", "kernel_h", "kernel_w", "stride"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value <= 0:
                raise ValidationError(f"LayerSpec.{name} must be a positive integer, got {value!r}")
        if self.kind is LayerKind.FULLY_CONNECTED and (self.kernel_h, self.kernel_w, self.stride) != (1, 1, 1):
            raise ValidationError("fully-connected layers take no kernel or stride")

    @property
    def neurons(self) -> int:
        return self.out_dim

    @property
    def is_conv(self) -> bool:
        return self.kind is LayerKind.CONV2D

    @property
    def weight_shape(self) -> Tuple[int, ...]:
        if self.is_conv:
            return (self.out_dim, self.in_dim, self.kernel_h, self.kernel_w)
        return (self.in_dim, self.out_dim)

    @property
    def neuron_axis(self) -> int:
        return 0 if self.is_conv else 1

    @property
    def input_axis(self) -> int:
        return 1 if self.is_conv else 0

    def output_shape(self, input_shape: Tuple[int, ...]) -> Tuple[int, ...]:
        """Per-sample output shape for a per-sample ``input_shape``.

        Raises:
            ShapeError: If ``input_shape`` cannot feed this layer
        """
        if self.is_conv:
            if len(input_shape) != 3 or input_shape[0] != self.in_dim:
                raise ShapeError(f"conv layer expects ({self.in_dim}, H, W), got {input_shape}")
            _, height, width = input_shape
            out_h = (height - self.kernel_h) // self.stride + 1
            out_w = (width - self.kernel_w) // self.stride + 1
            if out_h <= 0 or out_w <= 0:
                raise ShapeError(f"kernel {self.kernel_h}x{self.kernel_w} larger than input {input_shape}")
            return (self.out_dim, out_h, out_w)
        flat = int(np.prod(input_shape))
        if flat != self.in_dim:
            raise ShapeError(f"fc layer expects {self.in_dim} inputs, got {input_shape} ({flat})")
        return (self.out_dim,)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "in_dim": self.in_dim,
            "out_dim": self.out_dim,
            "activation": self.activation.value,
            "has_bias": self.has_bias,
            "has_channel_scale": self.has_channel_scale,
            "kernel_h": self.kernel_h,
            "kernel_w": self.kernel_w,
            "stride": self.stride,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LayerSpec":
        return cls(
            kind=LayerKind(data["kind"]),
            in_dim=data["in_dim"],
            out_dim=data["out_dim"],
            activation=Activation(data["activation"]),
            has_bias=bool(data["has_bias"]),
            has_channel_scale=bool(data["has_channel_scale"]),
            kernel_h=data.get("kernel_h", 1),
            kernel_w=data.get("kernel_w", 1),
            stride=data.get("stride", 1),
        )


def tensor_name(layer: int, part: str) -> str:
    """Canonical tensor key, e.g. ``layer1.weight``."""
    return f"layer{layer}.{part}"


@dataclass
class ModelBundle:
    """Architecture, float32 weights and metadata: the unit of attack and storage.

    Tensors are keyed ``layer{l}.weight`` plus optional ``.bias``, ``.scale``
    and ``.shift``. FC weights are ``(N_{l-1}, N_l)`` so neurons are columns;
    conv weights are ``(out, in, kh, kw)`` so neurons are the first axis.
    Operations never mutate a bundle's arrays in place.
    """

    layers: List[LayerSpec]
    weights: Dict[str, np.ndarray]
    input_shape: Tuple[int, ...]
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.input_shape = tuple(int(d) for d in self.input_shape)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def weight(self, layer: int) -> np.ndarray:
        return self.weights[tensor_name(layer, "weight")]

    def part(self, layer: int, part: str) -> Optional[np.ndarray]:
        return self.weights.get(tensor_name(layer, part))

    def declared_tensors(self) -> List[Tuple[str, Tuple[int, ...]]]:
        """Every tensor the architecture requires, in storage order."""
        declared = []
        for index, spec in enumerate(self.layers):
            declared.append((tensor_name(index, "weight"), spec.weight_shape))
            if spec.has_bias:
                declared.append((tensor_name(index, "bias"), (spec.neurons,)))
            if spec.has_channel_scale:
                declared.append((tensor_name(index, "scale"), (spec.neurons,)))
                declared.append((tensor_name(index, "shift"), (spec.neurons,)))
        return declared

    def layer_shapes(self) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
        """Per-layer (input, output) per-sample shapes."""
        shapes = []
        current = self.input_shape
        for spec in self.layers:
            out = spec.output_shape(current)
            shapes.append((current, out))
            current = out
        return shapes

    def validate(self) -> "ModelBundle":
        """Check dimension chaining and tensor presence.

        Raises:
            ShapeError: On any structural inconsistency
        """
        if not self.layers:
            raise ShapeError("model has no layers")
        if self.layers[-1].activation is not Activation.IDENTITY:
            raise ShapeError("last layer must use the identity activation")
        self.layer_shapes()
        declared = dict(self.declared_tensors())
        for name, shape in declared.items():
            if name not in self.weights:
                raise ShapeError(f"missing tensor {name}")
            if tuple(self.weights[name].shape) != shape:
                raise ShapeError(f"{name} has shape {self.weights[name].shape}, expected {shape}")
        extra = sorted(set(self.weights) - set(declared))
        if extra:
            raise ShapeError(f"undeclared tensors: {', '.join(extra)}")
        return self

    def with_tensors(self, updates: Dict[str, np.ndarray], **metadata: Any) -> "ModelBundle":
        """New bundle with ``updates`` swapped in; other arrays are shared."""
        weights = dict(self.weights)
        for name, value in updates.items():
            weights[name] = np.ascontiguousarray(value, dtype=np.float32)
        merged = {**self.metadata, **metadata}
        return ModelBundle(list(self.layers), weights, self.input_shape, merged)

    def copy(self) -> "ModelBundle":
        weights = {name: value.copy() for name, value in self.weights.items()}
        return ModelBundle(list(self.layers), weights, self.input_shape, _copy_metadata(self.metadata))

    def same_architecture(self, other: "ModelBundle") -> bool:
        return self.layers == other.layers and self.input_shape == other.input_shape

    def bit_equal(self, other: "ModelBundle") -> bool:
        """True when architectures match and every tensor is byte-identical."""
        if not self.same_architecture(other) or set(self.weights) != set(other.weights):
            return False
        return all(
            self.weights[name].tobytes() == other.weights[name].tobytes()
            and self.weights[name].dtype == other.weights[name].dtype
            for name in self.weights
        )


def _copy_metadata(metadata: Dict[str, Any]) -> Dict[str, Any]:
    copied: Dict[str, Any] = {}
    for key, value in metadata.items():
        copied[key] = _copy_metadata(value) if isinstance(value, dict) else value
    return copied


@dataclass(frozen=True)
class Dataset:
    """Labelled samples, immutable after construction."""

    inputs: np.ndarray
    labels: np.ndarray
    num_classes: int
    name: str = "blobs"

    def __post_init__(self) -> None:
        if len(self.labels) == 0 or len(self.inputs) != len(self.labels):
            raise ShapeError(f"dataset needs n > 0 aligned samples, got {len(self.inputs)} / {len(self.labels)}")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise ValidationError(f"labels must lie in [0, {self.num_classes})")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def sample_shape(self) -> Tuple[int, ...]:
        return tuple(self.inputs.shape[1:])


# ╭──────────────────────────────────────────────────────╮
# │  🏋️ Training & Perturbation                           │
# ╰──────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class TrainConfig:
    """SGD hyper-parameters. ``watermark_hook`` adds a regularizer when set."""

    epochs: int = DEFAULT_EPOCHS
    learning_rate: float = DEFAULT_LEARNING_RATE
    momentum: float = DEFAULT_MOMENTUM
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    batch_size: int = DEFAULT_BATCH_SIZE
    seed: int = 0
    watermark_hook: Optional[Any] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.epochs < 0:
            raise ValidationError("epochs must be >= 0")
        if not self.learning_rate > 0:
            raise ValidationError("learning_rate must be > 0")
        if not 0 <= self.momentum < 1:
            raise ValidationError("momentum must lie in [0, 1)")
        if self.weight_decay < 0:
            raise ValidationError("weight_decay must be >= 0")
        if self.batch_size < 1:
            raise ValidationError("batch_size must be >= 1")

    def with_(self, **changes: Any) -> "TrainConfig":
        return replace(self, **changes)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "momentum": self.momentum,
            "weight_decay": self.weight_decay,
            "batch_size": self.batch_size,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "TrainConfig":
        return cls(**{key: data[key] for key in cls().to_dict() if key in data})


@dataclass(frozen=True)
class PerturbationSpec:
    """A single model alteration; ``target_layer=None`` hits every layer."""

    kind: PerturbationKind
    value: float
    target_layer: Optional[int] = None
    neuron: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", PerturbationKind(self.kind))
        value = float(self.value)
        if not math.isfinite(value):
            raise ValidationError("perturbation parameter must be finite")
        if self.kind in (PerturbationKind.GAUSSIAN_NOISE, PerturbationKind.FINE_TUNE) and value < 0:
            raise ValidationError(f"{self.kind.value} parameter must be >= 0")
        if self.kind is PerturbationKind.QUANTIZE and (value < 1 or value != int(value)):
            raise ValidationError("quantization bits must be an integer >= 1")
        if self.kind is PerturbationKind.MAGNITUDE_PRUNE and not 0 <= value <= 1:
            raise ValidationError("pruning fraction must lie in [0, 1]")
        if self.kind is PerturbationKind.SCALAR_MULTIPLE and self.target_layer is None:
            raise ValidationError("scalar attack needs a target layer")


# ╭──────────────────────────────────────────────────────╮
# │  🔁 Re-synchronization Reports                        │
# ╰──────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class LayerResync:
    layer: int
    permutation: Permutation
    psi: Optional[float]
    margin: float
    ties: int
    duplicates: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            "layer": self.layer,
            "perm": list(self.permutation.mapping),
            "psi": self.psi,
            "margin": self.margin,
            "ties": self.ties,
            "duplicates": self.duplicates,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "LayerResync":
        psi = data.get("psi")
        return cls(
            layer=int(data["layer"]),
            permutation=Permutation.from_iterable(data["perm"]),
            psi=None if psi is None else float(psi),
            margin=float(data["margin"]),
            ties=int(data["ties"]),
            duplicates=int(data.get("duplicates", 0)),
        )


@dataclass(frozen=True)
class ResyncReport:
    """Recovered permutations per layer and, in evaluation mode, Ψ scores."""

    layers: List[LayerResync]
    overall_psi: Optional[float]
    method: MatchMethod

    def layer(self, index: int) -> LayerResync:
        for entry in self.layers:
            if entry.layer == index:
                return entry
        raise KeyError(index)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "layers": [entry.to_dict() for entry in self.layers],
            "overallPsi": self.overall_psi,
            "method": self.method.value,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "ResyncReport":
        overall = data.get("overallPsi")
        return cls(
            layers=[LayerResync.from_dict(entry) for entry in data["layers"]],
            overall_psi=None if overall is None else float(overall),
            method=MatchMethod(data["method"]),
        )


# ╭──────────────────────────────────────────────────────╮
# │  🛡️ Integrity                                         │
# ╰──────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class InputGaussianSpec:
    """Gaussian model of a layer input: mean μ and covariance Σ.

    ``covariance`` may be a full matrix or a 1-D diagonal.
    """

    mean: np.ndarray
    covariance: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "mean", np.asarray(self.mean, dtype=np.float64).ravel())
        object.__setattr__(self, "covariance", np.asarray(self.covariance, dtype=np.float64))
        if self.covariance_matrix().shape != (self.dim, self.dim):
            raise ShapeError(f"covariance shape {self.covariance.shape} does not match mean of length {self.dim}")

    @property
    def dim(self) -> int:
        return int(self.mean.size)

    def covariance_matrix(self) -> np.ndarray:
        if self.covariance.ndim == 1:
            return np.diag(self.covariance)
        return self.covariance


@dataclass(frozen=True)
class NeuronVerdict:
    index: int
    cosine: float
    norm_ratio: float
    flag: NeuronFlag

    def to_dict(self) -> Dict[str, Any]:
        return {
            "index": self.index,
            "cosineToReference": self.cosine,
            "normRatio": self.norm_ratio,
            "flag": self.flag.value,
        }


@dataclass(frozen=True)
class IntegrityVerdict:
    layer: int
    neurons: List[NeuronVerdict]

    @property
    def layer_flag(self) -> NeuronFlag:
        flags = [n.flag for n in self.neurons] or [NeuronFlag.CLEAN]
        return max(flags, key=lambda flag: flag.severity)

    def flagged(self, flag: NeuronFlag) -> List[int]:
        return [n.index for n in self.neurons if n.flag is flag]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "layer": self.layer,
            "layerVerdict": self.layer_flag.value,
            "neurons": [n.to_dict() for n in self.neurons],
        }


class CollinearityCheck(NamedTuple):
    """Outcome of the Cauchy–Schwarz test on a neuron and its altered copy."""

    exactly_collinear: bool
    similarity: float


# ╭──────────────────────────────────────────────────────╮
# │  🔐 Watermark                                         │
# ╰──────────────────────────────────────────────────────╯


@dataclass(frozen=True)
class WatermarkRecord:
    """Projection watermark parameters; ``bits`` stay with the verifier.

    ``feature_dim`` is filled in at embedding time and pins the projection
    matrix shape.
    """

    target_layer: int
    projection_seed: int
    strength: float
    num_bits: int
    feature_dim: Optional[int] = None
    bits: Optional[np.ndarray] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.num_bits < 1:
            raise ValidationError("watermark needs at least one bit")
        if self.strength < 0:
            raise ValidationError("watermark strength must be >= 0")
        if self.bits is not None:
            bits = np.asarray(self.bits, dtype=np.uint8).ravel()
            if bits.size != self.num_bits or np.any(bits > 1):
                raise ValidationError(f"watermark bits must be {self.num_bits} values in {{0, 1}}")
            object.__setattr__(self, "bits", bits)

    def to_metadata(self) -> Dict[str, Any]:
        return {
            "target_layer": self.target_layer,
            "projection_seed": self.projection_seed,
            "strength": self.strength,
            "num_bits": self.num_bits,
            "feature_dim": self.feature_dim,
        }

    def with_(self, **changes: Any) -> "WatermarkRecord":
        return replace(self, **changes)

    def to_key(self) -> Dict[str, Any]:
        key = self.to_metadata()
        key["bits"] = [] if self.bits is None else [int(b) for b in self.bits]
        return key

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "WatermarkRecord":
        bits = data.get("bits")
        feature_dim = data.get("feature_dim")
        return cls(
            target_layer=int(data["target_layer"]),
            projection_seed=int(data["projection_seed"]),
            strength=float(data["strength"]),
            num_bits=int(data["num_bits"]),
            feature_dim=None if feature_dim is None else int(feature_dim),
            bits=None if not bits else np.asarray(bits, dtype=np.uint8),
        )


class Extraction(NamedTuple):
    bits: np.ndarray
    pearson: float
    ber: float


# ╭──────────────────────────────────────────────────────╮
# │  📈 Sweeps                                            │
# ╰──────────────────────────────────────────────────────╯


class SweepRow(NamedTuple):
    kind: str
    param: float
    seed: int
    psi: float
    metric: float
