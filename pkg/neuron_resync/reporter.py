"""
Reporter - Human-Readable Results 📊

Renders re-synchronization reports, integrity verdicts, watermark
extractions and sweep summaries for the terminal. Machine-readable output
(JSON, CSV, ``psi=`` lines) stays with the CLI.
"""

from typing import Dict, Tuple

from .core.types import Extraction, IntegrityVerdict, NeuronFlag, ResyncReport
from .integrity.divergence import BoundRow

_FLAG_ICONS = {NeuronFlag.CLEAN: "✅", NeuronFlag.SCALED_NEURON: "⚠️", NeuronFlag.MODIFIED: "❌"}


def print_resync_report(report: ResyncReport) -> None:
    """Print one line per layer plus the overall Ψ.

    Args:
        report: Report from ``resync_model``
    """
    print(f"🔁 Re-synchronization ({report.method.value})")
    for entry in report.layers:
        psi = "n/a" if entry.psi is None else f"{entry.psi:.1f}"
        print(
            f"   layer {entry.layer}: psi={psi} margin={entry.margin:.6f} "
            f"ties={entry.ties} duplicates={entry.duplicates}"
        )
    if report.overall_psi is not None:
        print(f"   overall psi={report.overall_psi:.1f}")


def print_integrity_verdict(verdict: IntegrityVerdict) -> None:
    """Print the layer verdict and every non-clean neuron."""
    flag = verdict.layer_flag
    print(f"{_FLAG_ICONS[flag]} Layer {verdict.layer}: {flag.value}")
    for neuron in verdict.neurons:
        if neuron.flag is NeuronFlag.CLEAN:
            continue
        print(
            f"   neuron {neuron.index}: {neuron.flag.value} "
            f"cosine={neuron.cosine:.8f} normRatio={neuron.norm_ratio:.6f}"
        )


def print_extraction(extraction: Extraction) -> None:
    bits = "".join(str(int(b)) for b in extraction.bits)
    print(f"🔐 Watermark bits: {bits}")


def print_bound_report(rows: Tuple[BoundRow, ...]) -> None:
    """Tabulate the Gaussian bound against both ReLU expressions."""
    print("📐 k        gaussian     relu-exact   relu-closed")
    for row in rows:
        exact = "≤" if row.exact_bounded else ">"
        closed = "≤" if row.closed_form_bounded else ">"
        print(
            f"   {row.k:<8.3f} {row.gaussian:<12.6f} {row.relu_exact:<10.6f} {exact} "
            f"{row.relu_closed_form:<12.6f} {closed}"
        )


def print_sweep_summary(summary: Dict[float, Tuple[float, float]]) -> None:
    """Seed-averaged Ψ and task error per parameter."""
    print("📈 param    psi      metric")
    for param, (psi, metric) in summary.items():
        print(f"   {param:<8g} {psi:<8.2f} {metric:.2f}")
