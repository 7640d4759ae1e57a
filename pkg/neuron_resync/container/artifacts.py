"""
JSON Artifacts - Permutations, Reports & Keys 🗂️

Small JSON side files exchanged between commands: permutation files,
re-synchronization reports, integrity verdicts and watermark keys.
"""

import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

from ..core.errors import NwrsError, ValidationError, WatermarkError
from ..core.permutation import Permutation
from ..core.types import IntegrityVerdict, ResyncReport, WatermarkRecord
from ..core.utils import ensure_parent

PathLike = Union[str, Path]


def write_json(data: Any, path: PathLike) -> None:
    """Write ``data`` as indented JSON; floats keep full round-trip precision."""
    ensure_parent(path).write_text(json.dumps(data, indent=2) + "\n", encoding="utf-8")


def read_json(path: PathLike) -> Any:
    """Parse a JSON file, mapping syntax errors to ``ValidationError``."""
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except ValueError as exc:
        raise ValidationError(f"{path}: invalid JSON ({exc})") from exc


# ╭──────────────────────────────────────────────────────╮
# │  🔀 Permutation Files                                 │
# ╰──────────────────────────────────────────────────────╯


def save_permutation(perm: Permutation, layer: int, path: PathLike, seed: Optional[int] = None) -> None:
    """Write ``{layer, perm, seed}``."""
    data: Dict[str, Any] = {"layer": layer, "perm": list(perm.mapping)}
    if seed is not None:
        data["seed"] = seed
    write_json(data, path)


def load_permutation(path: PathLike) -> Tuple[int, Permutation]:
    """Read a permutation file.

    Returns:
        Tuple of (layer index, permutation)

    Raises:
        ValidationError: If the file is malformed or the map is not a bijection
    """
    data = read_json(path)
    try:
        layer = data["layer"]
        if isinstance(layer, bool) or not isinstance(layer, int):
            raise ValidationError(f"layer must be an integer, got {layer!r}")
        return layer, Permutation.from_iterable(data["perm"])
    except NwrsError as exc:
        raise ValidationError(f"{path}: {exc.detail}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed permutation file ({exc!r})") from exc


# ╭──────────────────────────────────────────────────────╮
# │  📑 Reports & Verdicts                                │
# ╰──────────────────────────────────────────────────────╯


def save_report(report: ResyncReport, path: PathLike) -> None:
    write_json(report.to_dict(), path)


def load_report(path: PathLike) -> ResyncReport:
    data = read_json(path)
    try:
        return ResyncReport.from_dict(data)
    except NwrsError as exc:
        raise ValidationError(f"{path}: {exc.detail}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed report ({exc!r})") from exc


def save_verdict(verdict: IntegrityVerdict, path: PathLike) -> None:
    write_json(verdict.to_dict(), path)


# ╭──────────────────────────────────────────────────────╮
# │  🔑 Watermark Keys                                    │
# ╰──────────────────────────────────────────────────────╯


def save_watermark_key(record: WatermarkRecord, path: PathLike) -> None:
    """Write the verifier key: the record plus its bits."""
    if record.bits is None:
        raise WatermarkError("a watermark key needs the bits")
    write_json(record.to_key(), path)


def load_watermark_key(path: PathLike) -> WatermarkRecord:
    """Read a verifier key written by :func:`save_watermark_key`."""
    data = read_json(path)
    try:
        record = WatermarkRecord.from_dict(data)
    except NwrsError as exc:
        raise ValidationError(f"{path}: {exc.detail}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"{path}: malformed watermark key ({exc!r})") from exc
    if record.bits is None:
        raise WatermarkError(f"{path}: key holds no bits")
    return record
