"""
Weight Container - Single-File Model Format 📦

Layout (all integers little-endian)::

    magic       4 bytes   b"NWRS"
    version     u32       1
    length      u64       manifest byte length, a multiple of 8
    manifest    UTF-8 JSON, space-padded to ``length``
    blob        float32 LE row-major tensors at 8-byte aligned offsets

The manifest holds ``architecture`` (input shape and layer specs),
``metadata`` and a ``tensors`` directory of
``{name, dtype, shape, offset, byteLength}`` entries with offsets relative
to the start of the blob.
"""

import json
import math
import struct
from pathlib import Path
from typing import Any, Dict, List, Tuple, Union

import numpy as np

from ..core.config import CONTAINER_ALIGNMENT, CONTAINER_DTYPE, CONTAINER_MAGIC, CONTAINER_VERSION
from ..core.errors import ContainerCorruptionError, ContainerFormatError, NwrsError
from ..core.types import LayerSpec, ModelBundle
from ..core.utils import ensure_parent

_HEADER = struct.Struct("<4sIQ")
_FLOAT32_LE = np.dtype("<f4")


def _pad(length: int) -> int:
    return -length % CONTAINER_ALIGNMENT


# ╭──────────────────────────────────────────────────────╮
# │  ✍️ Encoding                                          │
# ╰──────────────────────────────────────────────────────╯


def encode(bundle: ModelBundle) -> bytes:
    """Serialize ``bundle`` to container bytes.

    Tensors are written in declaration order (layer by layer: weight, bias,
    scale, shift).
    """
    bundle.validate()
    entries: List[Dict[str, Any]] = []
    chunks: List[bytes] = []
    offset = 0
    for name, shape in bundle.declared_tensors():
        payload = np.ascontiguousarray(bundle.weights[name], dtype=_FLOAT32_LE).tobytes()
        entries.append(
            {"name": name, "dtype": CONTAINER_DTYPE, "shape": list(shape), "offset": offset, "byteLength": len(payload)}
        )
        chunks.append(payload + b"\0" * _pad(len(payload)))
        offset += len(chunks[-1])

    manifest = {
        "architecture": {
            "input_shape": list(bundle.input_shape),
            "layers": [spec.to_dict() for spec in bundle.layers],
        },
        "metadata": bundle.metadata,
        "tensors": entries,
    }
    text = json.dumps(manifest, separators=(",", ":")).encode("utf-8")
    text += b" " * _pad(len(text))
    return _HEADER.pack(CONTAINER_MAGIC, CONTAINER_VERSION, len(text)) + text + b"".join(chunks)


def save(bundle: ModelBundle, path: Union[str, Path]) -> None:
    """Write ``bundle`` to ``path``."""
    ensure_parent(path).write_bytes(encode(bundle))


# ╭──────────────────────────────────────────────────────╮
# │  📖 Decoding                                          │
# ╰──────────────────────────────────────────────────────╯


def _read_header(data: bytes) -> Tuple[int, int]:
    if len(data) < len(CONTAINER_MAGIC) or data[: len(CONTAINER_MAGIC)] != CONTAINER_MAGIC:
        raise ContainerFormatError("bad magic: not a weight container")
    if len(data) < _HEADER.size:
        raise ContainerCorruptionError("truncated header")
    _, version, length = _HEADER.unpack_from(data)
    if version != CONTAINER_VERSION:
        raise ContainerFormatError(f"unsupported version {version}")
    if length > len(data) - _HEADER.size:
        raise ContainerCorruptionError(f"manifest length {length} exceeds file size")
    return _HEADER.size, length


def _check_entry(entry: Dict[str, Any], blob_size: int) -> Tuple[str, Tuple[int, ...], int, int]:
    name = entry["name"]
    if not isinstance(name, str):
        raise ContainerCorruptionError(f"tensor name {name!r} is not a string")
    shape = entry["shape"]
    offset = entry["offset"]
    length = entry["byteLength"]
    if entry["dtype"] != CONTAINER_DTYPE:
        raise ContainerCorruptionError(f"{name}: unsupported dtype {entry['dtype']!r}")
    if not isinstance(shape, list) or not all(isinstance(d, int) and d > 0 for d in shape):
        raise ContainerCorruptionError(f"{name}: invalid shape {shape!r}")
    if not isinstance(offset, int) or not isinstance(length, int) or offset < 0:
        raise ContainerCorruptionError(f"{name}: invalid offset or length")
    if offset % CONTAINER_ALIGNMENT:
        raise ContainerCorruptionError(f"{name}: offset {offset} is not {CONTAINER_ALIGNMENT}-byte aligned")
    if length != math.prod(shape) * _FLOAT32_LE.itemsize:
        raise ContainerCorruptionError(f"{name}: byteLength {length} does not match shape {shape}")
    if offset + length > blob_size:
        raise ContainerCorruptionError(f"{name}: payload runs past the end of the blob")
    return name, tuple(shape), offset, length


def _decode(data: bytes) -> ModelBundle:
    start, length = _read_header(data)
    manifest = json.loads(data[start : start + length].decode("utf-8"))
    blob = memoryview(data)[start + length :]

    architecture = manifest["architecture"]
    layers = [LayerSpec.from_dict(spec) for spec in architecture["layers"]]
    input_shape = tuple(int(d) for d in architecture["input_shape"])
    metadata = manifest.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ContainerCorruptionError("metadata is not an object")

    weights: Dict[str, np.ndarray] = {}
    spans: List[Tuple[int, int, str]] = []
    for entry in manifest["tensors"]:
        name, shape, offset, size = _check_entry(entry, len(blob))
        if name in weights:
            raise ContainerCorruptionError(f"{name}: duplicate tensor entry")
        array = np.frombuffer(blob, dtype=_FLOAT32_LE, count=size // _FLOAT32_LE.itemsize, offset=offset)
        weights[name] = array.astype(np.float32).reshape(shape)
        spans.append((offset, offset + size, name))

    spans.sort()
    for (_, end, first), (begin, _, second) in zip(spans, spans[1:]):
        if begin < end:
            raise ContainerCorruptionError(f"{second}: payload overlaps {first}")

    return ModelBundle(layers, weights, input_shape, metadata).validate()


def decode(data: bytes) -> ModelBundle:
    """Parse container bytes.

    Raises:
        ContainerFormatError: On bad magic or an unsupported version
        ContainerCorruptionError: When the manifest and payload disagree
    """
    try:
        return _decode(data)
    except (ContainerFormatError, ContainerCorruptionError):
        raise
    except NwrsError as exc:
        raise ContainerCorruptionError(f"invalid manifest: {exc.detail}") from exc
    except (KeyError, IndexError, TypeError, ValueError, AttributeError, OverflowError) as exc:
        raise ContainerCorruptionError(f"invalid manifest: {exc!r}") from exc


def load(path: Union[str, Path]) -> ModelBundle:
    """Read a bundle from ``path``."""
    return decode(Path(path).read_bytes())
