"""
Command Line Interface - Operator Command Suite 🖥️

Subcommands generate reference models, permute and perturb them,
re-synchronize suspects, gate integrity, embed and read watermarks, run
robustness sweeps and evaluate the KL closed forms. Every failure ends with
exit status 1 and a single ``error: <category>: <detail>`` line on stderr;
``verify`` reserves 2 and 3 for scaled and modified layers.
"""

import argparse
import json
import logging
import sys
from typing import Callable, Dict, List, NoReturn, Optional

from . import __version__
from .attack.permutation import check_layer, permute_layer, random_permutation
from .attack.perturbations import apply_perturbation
from .container.artifacts import (
    load_permutation,
    load_watermark_key,
    save_permutation,
    save_report,
    save_verdict,
    save_watermark_key,
)
from .container.weights import load, save
from .core.config import DEFAULT_EPOCHS, WATERMARK_BITS, WATERMARK_STRENGTH, Settings, load_settings
from .core.errors import NwrsError, UsageError, ValidationError
from .core.types import MatchMethod, ModelBundle, PerturbationKind, PerturbationSpec
from .integrity.divergence import (
    kl_gaussian_scaled,
    kl_relu_positive_part,
    kl_relu_scaled,
    mc_kl_gaussian_scaled,
    mc_kl_relu_scaled,
    relu_bound_report,
)
from .integrity.verification import correct_scaling, verify_integrity
from .model.metrics import error_rate
from .model.network import default_target_layer
from .reporter import (
    print_bound_report,
    print_extraction,
    print_integrity_verdict,
    print_resync_report,
    print_sweep_summary,
)
from .resync.synchronizer import resync_model
from .sweep import run_sweep, summarize, write_csv
from .trainer.reference import reference_setup, training_context, untrained_setup
from .watermark.projection import default_record, embed, extract

logger = logging.getLogger(__name__)

BOUND_GRID = (-0.9, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 3.0)

# ╭──────────────────────────────────────────────────────╮
# │  🎮 Command Interface - Argument Processing          │
# ╰──────────────────────────────────────────────────────╯


class _Parser(argparse.ArgumentParser):
    """Argument parser that raises instead of exiting with status 2."""

    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _float_list(text: str) -> List[float]:
    try:
        return [float(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    """Construct the full subcommand parser."""
    parser = _Parser(prog="neuron-resync", description=f"Neuron re-synchronization toolkit v{__version__}")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for info, -vv for debug logs")
    parser.add_argument("--config", help="YAML settings file (default: $NWRS_CONFIG)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    gen = commands.add_parser("gen-model", help="train a reference model and save it")
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--conv", action="store_true", help="convolutional reference instead of the MLP")
    gen.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)

    perm = commands.add_parser("permute", help="apply a random neuron permutation to one layer")
    perm.add_argument("--in", dest="source", required=True)
    perm.add_argument("--layer", type=int)
    perm.add_argument("--seed", type=int, default=0)
    perm.add_argument("--out", required=True)
    perm.add_argument("--perm-out")

    pert = commands.add_parser("perturb", help="apply one perturbation")
    pert.add_argument("--in", dest="source", required=True)
    pert.add_argument("--kind", required=True, choices=[k.value for k in PerturbationKind])
    pert.add_argument("--param", type=float, required=True)
    pert.add_argument("--layer", type=int)
    pert.add_argument("--all-layers", action="store_true", help="perturb every layer (global ranking for prune)")
    pert.add_argument("--neuron", type=int, default=0, help="neuron hit by the scalar attack")
    pert.add_argument("--seed", type=int, default=0)
    pert.add_argument("--out", required=True)

    sync = commands.add_parser("resync", help="restore the reference neuron order of a suspect")
    sync.add_argument("--ref", required=True)
    sync.add_argument("--suspect", required=True)
    sync.add_argument("--method", choices=[m.value for m in MatchMethod])
    sync.add_argument("--true-perm", help="permutation file for Ψ scoring")
    sync.add_argument("--out")
    sync.add_argument("--report")

    ver = commands.add_parser("verify", help="ℓ2-norm integrity check of one layer")
    ver.add_argument("--ref", required=True)
    ver.add_argument("--suspect", required=True)
    ver.add_argument("--layer", type=int)
    ver.add_argument("--correct", action="store_true", help="undo detected neuron scaling")
    ver.add_argument("--out", help="where to save the corrected model")
    ver.add_argument("--verdict", help="write the verdict JSON here instead of stdout")

    wm = commands.add_parser("wm", help="projection watermark operations")
    wm_commands = wm.add_subparsers(dest="wm_command", required=True, parser_class=_Parser)
    wm_embed = wm_commands.add_parser("embed", help="train a reference model with a watermark")
    wm_embed.add_argument("--out", required=True)
    wm_embed.add_argument("--key", required=True, help="verifier key file (holds the bits)")
    wm_embed.add_argument("--seed", type=int, default=0)
    wm_embed.add_argument("--conv", action="store_true")
    wm_embed.add_argument("--bits", type=int, default=WATERMARK_BITS)
    wm_embed.add_argument("--strength", type=float, default=WATERMARK_STRENGTH)
    wm_embed.add_argument("--layer", type=int, help="target layer (default: output layer)")
    wm_embed.add_argument("--epochs", type=int, default=DEFAULT_EPOCHS)
    wm_extract = wm_commands.add_parser("extract", help="read a watermark back")
    wm_extract.add_argument("--in", dest="source", required=True)
    wm_extract.add_argument("--key", required=True)

    sweep = commands.add_parser("sweep", help="robustness sweep to CSV")
    sweep.add_argument("--kind", required=True, choices=[k.value for k in PerturbationKind])
    sweep.add_argument("--params", type=_float_list, help="comma-separated grid (default: preset grid)")
    sweep.add_argument("--seeds", type=int, default=10)
    sweep.add_argument("--first-seed", type=int, default=0)
    sweep.add_argument("--csv", required=True)
    sweep.add_argument("--ref", help="reference model (default: train one from --model-seed)")
    sweep.add_argument("--model-seed", type=int, default=0)
    sweep.add_argument("--conv", action="store_true")
    sweep.add_argument("--layer", type=int)
    sweep.add_argument("--method", choices=[m.value for m in MatchMethod])

    kl = commands.add_parser("kl", help="closed-form KL of a scaled neuron and its Monte-Carlo estimate")
    kl.add_argument("--k", type=float, required=True)
    kl.add_argument("--relu", action="store_true")
    kl.add_argument("--mu", type=float, default=0.0)
    kl.add_argument("--sigma", type=float, default=1.0)
    kl.add_argument("--seed", type=int, default=0)
    kl.add_argument("--bound", action="store_true", help="also tabulate the Gaussian bound over a k grid")
    return parser


def parse_args(args: Optional[List[str]] = None) -> argparse.Namespace:
    """Parse command line arguments.

    Raises:
        UsageError: On any parse failure
    """
    return build_parser().parse_args(args)


def configure_logging(verbosity: int) -> None:
    """Route package logs to stderr: WARNING, INFO (-v) or DEBUG (-vv)."""
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    package = logging.getLogger("neuron_resync")
    package.setLevel(level)
    if not package.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        package.addHandler(handler)


# ╭──────────────────────────────────────────────────────╮
# │  🛠️ Subcommands                                       │
# ╰──────────────────────────────────────────────────────╯


def _layer(bundle: ModelBundle, layer: Optional[int]) -> int:
    return check_layer(bundle, default_target_layer(bundle) if layer is None else layer)


def _method(args: argparse.Namespace, settings: Settings) -> MatchMethod:
    return MatchMethod(args.method or settings.resync_method)


def cmd_gen_model(args: argparse.Namespace, settings: Settings) -> int:
    setup = reference_setup(args.seed, conv=args.conv, epochs=args.epochs)
    save(setup.model, args.out)
    logger.info("reference model error rate %.2f%%", error_rate(setup.model, setup.dataset))
    return 0


def cmd_permute(args: argparse.Namespace, settings: Settings) -> int:
    bundle = load(args.source)
    layer = _layer(bundle, args.layer)
    perm = random_permutation(bundle.layers[layer].neurons, args.seed)
    save(permute_layer(bundle, layer, perm), args.out)
    if args.perm_out:
        save_permutation(perm, layer, args.perm_out, seed=args.seed)
    return 0


def cmd_perturb(args: argparse.Namespace, settings: Settings) -> int:
    bundle = load(args.source)
    layer = None if args.all_layers else _layer(bundle, args.layer)
    spec = PerturbationSpec(PerturbationKind(args.kind), args.param, target_layer=layer, neuron=args.neuron)
    dataset = config = None
    if spec.kind is PerturbationKind.FINE_TUNE:
        context = training_context(bundle)
        dataset, config = context.dataset, context.config
    result = apply_perturbation(
        bundle,
        spec,
        args.seed,
        dataset,
        config,
        scale_mode=settings.noise_scale,
        include_bias=settings.noise_include_bias,
    )
    save(result, args.out)
    return 0


def cmd_resync(args: argparse.Namespace, settings: Settings) -> int:
    reference = load(args.ref)
    suspect = load(args.suspect)
    true_perms = None
    scored_layer = None
    if args.true_perm:
        scored_layer, perm = load_permutation(args.true_perm)
        true_perms = {scored_layer: perm}
    fixed, report = resync_model(reference, suspect, _method(args, settings), true_perms)
    if args.out:
        save(fixed, args.out)
    if args.report:
        save_report(report, args.report)
    if args.verbose:
        print_resync_report(report)
    if scored_layer is not None:
        print(f"psi={report.layer(scored_layer).psi}")
    return 0


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    reference = load(args.ref)
    suspect = load(args.suspect)
    layer = _layer(reference, args.layer)
    verdict = verify_integrity(reference, suspect, layer, settings.cosine_eps, settings.norm_eps)
    if args.correct:
        if not args.out:
            raise ValidationError("--correct needs --out for the corrected model")
        save(correct_scaling(suspect, verdict), args.out)
    if args.verdict:
        save_verdict(verdict, args.verdict)
    else:
        print(json.dumps(verdict.to_dict(), indent=2))
    if args.verbose:
        print_integrity_verdict(verdict)
    return verdict.layer_flag.exit_code


def cmd_wm(args: argparse.Namespace, settings: Settings) -> int:
    if args.wm_command == "embed":
        setup = untrained_setup(args.seed, conv=args.conv, epochs=args.epochs)
        record = default_record(setup.model, args.bits, args.seed, args.strength, args.layer)
        marked = embed(setup.model, setup.dataset, setup.config, record)
        save(marked, args.out)
        save_watermark_key(record.with_(feature_dim=marked.metadata["watermark"]["feature_dim"]), args.key)
        return 0

    bundle = load(args.source)
    extraction = extract(bundle, load_watermark_key(args.key))
    if args.verbose:
        print_extraction(extraction)
    print(f"pearson={extraction.pearson}")
    print(f"ber={extraction.ber}")
    return 0


def cmd_sweep(args: argparse.Namespace, settings: Settings) -> int:
    if args.ref:
        setup = training_context(load(args.ref))
    else:
        setup = reference_setup(args.model_seed, conv=args.conv)
    rows = run_sweep(
        setup,
        args.kind,
        params=args.params,
        seeds=args.seeds,
        first_seed=args.first_seed,
        layer=args.layer,
        method=_method(args, settings),
        threads=settings.threads,
        scale_mode=settings.noise_scale,
        include_bias=settings.noise_include_bias,
        progress=args.verbose > 0,
    )
    write_csv(rows, args.csv)
    if args.verbose:
        print_sweep_summary(summarize(rows))
    return 0


def cmd_kl(args: argparse.Namespace, settings: Settings) -> int:
    samples, sampler = settings.mc_samples, settings.mc_sampler
    if args.relu:
        print(kl_relu_scaled(args.k))
        estimate = mc_kl_relu_scaled(args.k, samples, args.seed, sampler)
        print(f"mc={estimate} exact={kl_relu_positive_part(args.k)}")
    else:
        print(kl_gaussian_scaled(args.k, args.mu, args.sigma))
        print(f"mc={mc_kl_gaussian_scaled(args.k, args.mu, args.sigma, samples, args.seed, sampler)}")
    if args.bound:
        print_bound_report(tuple(relu_bound_report(BOUND_GRID)))
    return 0


COMMANDS: Dict[str, Callable[[argparse.Namespace, Settings], int]] = {
    "gen-model": cmd_gen_model,
    "permute": cmd_permute,
    "perturb": cmd_perturb,
    "resync": cmd_resync,
    "verify": cmd_verify,
    "wm": cmd_wm,
    "sweep": cmd_sweep,
    "kl": cmd_kl,
}

# ╭──────────────────────────────────────────────────────╮
# │  🚀 Main Entry Point - Execution Flow               │
# ╰──────────────────────────────────────────────────────╯


def main(args: Optional[List[str]] = None) -> int:
    """Run one subcommand.

    Args:
        args: Command line arguments (None uses sys.argv)

    Returns:
        Exit code: 0 on success, 1 on error, 2/3 for flagged ``verify`` layers
    """
    try:
        parsed = parse_args(args)
        configure_logging(parsed.verbose)
        settings = load_settings(parsed.config)
        return COMMANDS[parsed.command](parsed, settings)
    except NwrsError as exc:
        print(exc.line(), file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
