"""
Sweep Harness - Perturbation Robustness Tables 📈

Runs the full permute → perturb → re-synchronize pipeline for every
(parameter, seed) cell of a perturbation grid and emits one CSV row per cell:
Ψ on the permuted layer and the task error of the perturbed model.
"""

import csv
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from tqdm import tqdm

from .attack.permutation import permute_layer, random_permutation
from .attack.perturbations import apply_perturbation
from .core.config import CSV_HEADER, DEFAULT_GRIDS
from .core.errors import ValidationError
from .core.types import MatchMethod, PerturbationKind, PerturbationSpec, SweepRow
from .core.utils import ensure_parent
from .model.metrics import error_rate
from .model.network import default_target_layer
from .resync.synchronizer import resync_model
from .trainer.reference import ReferenceSetup

logger = logging.getLogger(__name__)


def grid_for(kind: Union[str, PerturbationKind], params: Optional[Sequence[float]] = None) -> List[float]:
    """Explicit ``params`` or the preset grid of ``kind``."""
    kind = PerturbationKind(kind)
    if params is not None:
        return [float(p) for p in params]
    return list(DEFAULT_GRIDS[kind.value])


def run_cell(
    setup: ReferenceSetup,
    kind: PerturbationKind,
    param: float,
    seed: int,
    layer: int,
    method: MatchMethod = MatchMethod.GREEDY_GLOBAL,
    scale_mode: str = "std",
    include_bias: bool = False,
) -> SweepRow:
    """One pipeline run. A zero parameter means no perturbation for every kind."""
    reference = setup.model
    perm = random_permutation(reference.layers[layer].neurons, seed)
    suspect = permute_layer(reference, layer, perm)
    if param != 0:
        spec = PerturbationSpec(kind, param, target_layer=layer)
        suspect = apply_perturbation(
            suspect, spec, seed, setup.dataset, setup.config, scale_mode=scale_mode, include_bias=include_bias
        )
    _, report = resync_model(reference, suspect, method, true_perms={layer: perm})
    score = report.layer(layer).psi
    assert score is not None
    row = SweepRow(kind.value, float(param), int(seed), score, error_rate(suspect, setup.dataset))
    logger.debug("cell %s param=%s seed=%d psi=%.1f metric=%.2f", *row)
    return row


def run_sweep(
    setup: ReferenceSetup,
    kind: Union[str, PerturbationKind],
    params: Optional[Sequence[float]] = None,
    seeds: int = 10,
    first_seed: int = 0,
    layer: Optional[int] = None,
    method: MatchMethod = MatchMethod.GREEDY_GLOBAL,
    threads: Optional[int] = None,
    scale_mode: str = "std",
    include_bias: bool = False,
    progress: bool = False,
) -> List[SweepRow]:
    """Evaluate every (param, seed) cell, possibly in parallel.

    Rows come back in (param, seed) order whatever the completion order.

    Args:
        setup: Trained reference with its dataset and training config
        kind: Perturbation kind
        params: Parameter grid; defaults to the preset grid of ``kind``
        seeds: Number of seeds per parameter
        first_seed: First seed; cells use ``first_seed .. first_seed + seeds - 1``
        layer: Permuted and perturbed layer, the penultimate by default
        method: Matcher
        threads: Worker cap; defaults to the CPU count
        progress: Show a tqdm bar on stderr

    Returns:
        One row per cell
    """
    kind = PerturbationKind(kind)
    if seeds < 1:
        raise ValidationError("a sweep needs at least one seed")
    layer = default_target_layer(setup.model) if layer is None else layer
    cells: List[Tuple[float, int]] = [
        (param, seed) for param in grid_for(kind, params) for seed in range(first_seed, first_seed + seeds)
    ]
    workers = max(1, min(threads or os.cpu_count() or 1, len(cells)))

    def work(cell: Tuple[float, int]) -> SweepRow:
        return run_cell(setup, kind, cell[0], cell[1], layer, method, scale_mode, include_bias)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(tqdm(pool.map(work, cells), total=len(cells), desc=f"sweep {kind.value}", disable=not progress))
    return rows


def write_csv(rows: Iterable[SweepRow], path: Union[str, Path]) -> None:
    """Write rows under the fixed ``kind,param,seed,psi,metric`` header."""
    with ensure_parent(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([row.kind, repr(row.param), row.seed, repr(row.psi), repr(row.metric)])


def summarize(rows: Iterable[SweepRow]) -> Dict[float, Tuple[float, float]]:
    """Seed-averaged ``(psi, metric)`` per parameter, in grid order."""
    grouped: Dict[float, List[SweepRow]] = {}
    for row in rows:
        grouped.setdefault(row.param, []).append(row)
    return {
        param: (
            sum(r.psi for r in group) / len(group),
            sum(r.metric for r in group) / len(group),
        )
        for param, group in grouped.items()
    }
