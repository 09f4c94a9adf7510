"""
Command-line entry point.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 I/O or format error.
"""

import argparse
import sys
from fractions import Fraction
from typing import List, Optional, Sequence, Union

from loguru import logger
from pydantic import BaseModel, ValidationError

from catp.cli import commands
from catp.config import DEFAULT_TOLERANCE, FIXTURE_DIR, LOG_LEVEL, STRICT_VALIDATION
from catp.domain.reports import ValidationReport
from catp.exceptions import CatpError, InvalidInputError
from catp.toymodel import ToyConfig
from catp.utils.report_format import dump_reports
from catp.utils.version_utils import tool_version

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_USAGE = 2
EXIT_IO = 3


def configure_logging(verbose: bool = False) -> None:
    """Send diagnostics to stderr; stdout is reserved for reports."""
    logger.remove()
    logger.add(
        sys.stderr,
        level="DEBUG" if verbose else LOG_LEVEL,
        format="{level}: {message}",
    )


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number or fraction: '{text}'")
    return value


def _add_ratio(parser: argparse.ArgumentParser, repeatable: bool = False) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    action = "append" if repeatable else "store"
    more = "; repeat for one report per value" if repeatable else ""
    group.add_argument(
        "--ratio", type=_fraction, action=action, help=f"prune ratio p, e.g. 0.5 or 1/3{more}"
    )
    group.add_argument(
        "--keep",
        type=_fraction,
        action=action,
        help=f"fraction of query tokens kept, i.e. 1 - p (e.g. 1/4){more}",
    )


def _ratio(args: argparse.Namespace) -> Fraction:
    return args.ratio if args.ratio is not None else 1 - args.keep


def _ratios(args: argparse.Namespace) -> List[Fraction]:
    if args.ratio is not None:
        return list(args.ratio)
    return [1 - keep for keep in args.keep]


def _add_strictness(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--strict",
        action="store_true",
        default=STRICT_VALIDATION,
        help="reject inputs whose rows do not sum to 1",
    )
    parser.add_argument(
        "--tol", type=float, default=DEFAULT_TOLERANCE, help="normalization tolerance"
    )


def _add_scoring(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--input", required=True, help="CATP file the method scores")
    parser.add_argument("--method", choices=["catp", "l2", "selfattn"], default="catp")
    parser.add_argument(
        "--layers", default="all", help="all, first, single:K or subset:A,B,..."
    )
    parser.add_argument(
        "--weighted", action="store_true", help="weight votes by image-token importance"
    )
    parser.add_argument(
        "--weights-input", help="visual-encoder self-attention file for --weighted"
    )
    _add_strictness(parser)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="catp",
        description="Cross-attention token pruning: importance, pruning and analysis.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {tool_version()}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug diagnostics")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen-fixture", help="write a seeded toy fixture")
    gen.add_argument("--seed", type=int, default=7)
    gen.add_argument("--layers", type=int, default=6)
    gen.add_argument("--heads", type=int, default=2)
    gen.add_argument("--queries", type=int, default=8)
    gen.add_argument("--images", type=int, default=16)
    gen.add_argument("--dim", type=int, default=8)
    gen.add_argument("--temperature", type=float, default=1.0)
    gen.add_argument("--out-dir", default=FIXTURE_DIR)

    imp = sub.add_parser("importance", help="per-query-token importance")
    _add_scoring(imp)

    prune = sub.add_parser("prune", help="importance plus keep/prune decision")
    _add_scoring(prune)
    _add_ratio(prune)
    prune.add_argument("--emb", help="query embeddings, needed by --emit-pruned")
    prune.add_argument("--emit-pruned", help="write the kept embeddings to this file")

    compare = sub.add_parser("compare", help="kept-set agreement between methods")
    compare.add_argument("--cross", help="cross-attention file")
    compare.add_argument("--emb", help="query embedding file")
    compare.add_argument("--self-attn", help="query self-attention file (selfattn baseline)")
    compare.add_argument("--weights-input", help="visual-encoder self-attention file")
    compare.add_argument(
        "--methods",
        nargs="+",
        required=True,
        help="METHOD[@LAYERS] tokens, e.g. catp catp@first catp@subset:0,5 l2",
    )
    _add_ratio(compare, repeatable=True)
    _add_strictness(compare)

    sweep = sub.add_parser("sweep", help="vote with each single layer, then all layers")
    sweep.add_argument("--input", required=True, help="cross-attention file")
    sweep.add_argument("--weighted", action="store_true")
    sweep.add_argument("--weights-input")
    _add_ratio(sweep, repeatable=True)
    _add_strictness(sweep)

    validate = sub.add_parser("validate", help="check that attention rows sum to 1")
    validate.add_argument("--input", required=True)
    validate.add_argument("--tol", type=float, default=DEFAULT_TOLERANCE)

    return parser


def dispatch(args: argparse.Namespace) -> Union[BaseModel, List[BaseModel]]:
    """
    Build the command input from parsed arguments and run it.

    compare and sweep return one report per requested ratio.
    """
    if args.command == "gen-fixture":
        return commands.cmd_gen_fixture(
            commands.GenFixtureInput(
                toy=ToyConfig(
                    seed=args.seed,
                    layers=args.layers,
                    heads=args.heads,
                    n_query=args.queries,
                    n_image=args.images,
                    dim=args.dim,
                    temperature=args.temperature,
                ),
                out_dir=args.out_dir,
            )
        )
    if args.command in ("importance", "prune"):
        shared = dict(
            input=args.input,
            method=args.method,
            layers=args.layers,
            weighted=args.weighted,
            weights_input=args.weights_input,
            strict=args.strict,
            tolerance=args.tol,
        )
        if args.command == "importance":
            return commands.cmd_importance(commands.ImportanceInput(**shared))
        return commands.cmd_prune(
            commands.PruneInput(
                **shared, ratio=_ratio(args), emb=args.emb, emit_pruned=args.emit_pruned
            )
        )
    if args.command == "compare":
        return commands.cmd_compare(
            commands.CompareInput(
                cross=args.cross,
                emb=args.emb,
                self_attn=args.self_attn,
                weights_input=args.weights_input,
                methods=args.methods,
                ratios=_ratios(args),
                strict=args.strict,
                tolerance=args.tol,
            )
        )
    if args.command == "sweep":
        return commands.cmd_sweep(
            commands.SweepInput(
                input=args.input,
                ratios=_ratios(args),
                weighted=args.weighted,
                weights_input=args.weights_input,
                strict=args.strict,
                tolerance=args.tol,
            )
        )
    if args.command == "validate":
        return commands.cmd_validate(
            commands.ValidateInput(input=args.input, tolerance=args.tol)
        )
    raise InvalidInputError(f"Unknown command {args.command}")


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        result = dispatch(args)
    except CatpError as e:
        logger.error(str(e))
        return e.exit_code
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_IO

    reports: Sequence[BaseModel] = result if isinstance(result, list) else [result]
    sys.stdout.write(dump_reports(reports))
    sys.stdout.flush()
    if any(isinstance(r, ValidationReport) and r.violation_count for r in reports):
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
