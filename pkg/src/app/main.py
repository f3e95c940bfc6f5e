"""
hierq command line: reads JSON documents, runs one library operation, writes JSON.

Exit codes: 0 success, 1 validation or parse error, 2 infeasible repair,
3 numeric failure. Failures print a single `error[<CODE>]: <message>` line
on stderr.
"""

from pathlib import Path
from typing import Callable, Optional, Sequence
import argparse
import logging
import sys

from src.app.commands import density, haar, hierarchy, repair, sample
from src.app.commands.common import (
    EXIT_NUMERIC,
    CommandResult,
    ScenarioConfig,
    exit_code_for,
    write_json,
)
from src.service.util import resolve_tolerance
from src.utils.exceptions import AppError, ValidationError

logger = logging.getLogger(__name__)

Handler = Callable[[ScenarioConfig], CommandResult]

_GLOBAL_DESTS = {"tolerance", "output", "verbose", "handler", "command", "input", "batch", "output_dir", "seed"}


class _Parser(argparse.ArgumentParser):
    """Usage errors become ValidationError so they share exit code 1."""

    def error(self, message: str):
        raise ValidationError(message, code="USAGE_ERROR")


def _add_input(p: argparse.ArgumentParser, help_text: str) -> None:
    p.add_argument("--input", "-i", type=Path, required=True, help=f"{help_text} ('-' for stdin)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hierq", description="Hierarchical quantum state toolkit")
    parser.add_argument("--tolerance", type=float, default=None, help="Comparison tolerance in (0, 1e-3]")
    parser.add_argument("--output", "-o", type=Path, default=None, help="Output file (default stdout)")
    parser.add_argument("--verbose", "-v", action="count", default=0, help="-v info, -vv debug (stderr)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("haar-encode", help="Leaf layer -> Haar tree")
    _add_input(p, "Leaf layer JSON")
    p.add_argument("--threshold", type=float, default=None, help="Zero detail vectors with norm below this")
    p.set_defaults(handler=haar.haar_encode)

    p = sub.add_parser("haar-decode", help="Haar tree -> leaf layer")
    _add_input(p, "Haar tree JSON")
    p.set_defaults(handler=haar.haar_decode)

    p = sub.add_parser("density", help="Joint coefficients -> density matrix")
    _add_input(p, "Joint coefficients JSON")
    p.set_defaults(handler=density.density)

    p = sub.add_parser("reduce", help="Reduced density matrix of one micro factor")
    _add_input(p, "Joint coefficients JSON")
    p.add_argument("--subsystem", "-s", type=int, required=True, help="1-based micro factor index")
    p.set_defaults(handler=density.reduce)

    p = sub.add_parser("expect", help="Expectation of a micro-level observable")
    _add_input(p, "Joint coefficients JSON")
    p.add_argument("--operator", type=Path, required=True, help="Operator JSON")
    p.set_defaults(handler=density.expect)

    p = sub.add_parser("macro-expect", help="Expectation of a macro-conditioned observable")
    _add_input(p, "Joint coefficients JSON")
    p.add_argument("--operator", type=Path, required=True, help="Macro-conditioned operator JSON")
    p.set_defaults(handler=density.macro_expect)

    p = sub.add_parser("diag", help="Occupation weights and eigenvectors of a density matrix")
    _add_input(p, "Density matrix JSON")
    p.set_defaults(handler=density.diag)

    p = sub.add_parser("cg", help="Decompose a product of SU(2) irreps")
    p.add_argument("--reps", required=True, help="Comma-separated two_j values, e.g. 1,1")
    p.add_argument("--target", type=int, default=None, help="two_j whose multiplicity to report")
    p.set_defaults(handler=hierarchy.cg)

    p = sub.add_parser("validate", help="Check the invariants of a hierarchical state tree")
    _add_input(p, "Tree JSON")
    p.add_argument("--consistency", action="store_true", help="Also check parent reps against child products")
    p.set_defaults(handler=hierarchy.validate)

    p = sub.add_parser("repair", help="Run the self-repair cascade on scenario file(s)")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument("--input", "-i", type=Path, help="Scenario JSON ('-' for stdin)")
    source.add_argument("--batch", type=Path, nargs="+", help="Scenario files run concurrently")
    p.add_argument("--output-dir", type=Path, default=None, help="Directory for batch traces")
    p.set_defaults(handler=repair.repair)

    p = sub.add_parser("sample", help="Seeded random input document of one kind")
    p.add_argument("--kind", required=True, choices=sample.SAMPLE_KINDS, help="Document kind to generate")
    p.add_argument("--seed", type=int, default=0, help="Random seed; the same seed gives the same document")
    p.add_argument("--macro-dim", type=int, default=2, help="Macro dimension (joint, macro-operator)")
    p.add_argument("--micro-dims", default="2,2", help="Comma-separated micro factor dimensions")
    p.add_argument("--dim", type=int, default=2, help="Leaf dimension (leaves)")
    p.add_argument("--depth", type=int, default=3, help="Leaf layer depth or maximum tree depth")
    p.set_defaults(handler=sample.sample)

    return parser


def _configure_logging(verbosity: int) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    logging.getLogger().setLevel(level)


def _to_config(args: argparse.Namespace) -> tuple[Handler, ScenarioConfig]:
    handler: Handler = args.handler
    inputs: tuple[Path, ...] = ()
    if getattr(args, "batch", None):
        handler = repair.repair_batch
        inputs = tuple(args.batch)
    elif getattr(args, "input", None) is not None:
        inputs = (args.input,)
    options = {k: v for k, v in vars(args).items() if k not in _GLOBAL_DESTS}
    config = ScenarioConfig(
        operation=args.command,
        inputs=inputs,
        tolerance=resolve_tolerance(args.tolerance),
        output=args.output,
        output_dir=getattr(args, "output_dir", None),
        seed=getattr(args, "seed", None),
        options=options,
    )
    return handler, config


def _report(code: str, message: str) -> None:
    print(f"error[{code}]: {' '.join(message.split())}", file=sys.stderr)


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, run one command, return the process exit code."""
    try:
        args = build_parser().parse_args(argv)
        _configure_logging(args.verbose)
        handler, config = _to_config(args)
        result = handler(config)
        write_json(result.payload, config.output)
        return result.exit_code
    except AppError as exc:
        _report(exc.code, exc.message)
        return exit_code_for(exc)
    except Exception as exc:  # noqa: BLE001
        logger.debug("Unhandled failure", exc_info=True)
        _report("NUMERIC_FAILURE", f"{type(exc).__name__}: {exc}")
        return EXIT_NUMERIC


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
