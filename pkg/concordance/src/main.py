"""Command-line interface for concordance-bounds."""

import argparse
import os
import sys
from typing import Optional

import yaml

from .commands import run_command
from .errors import ConcordanceError
from .logger import ConcordanceLogger, get_logger, set_verbosity
from .metrics import RunMetrics
from .problem_file import ProblemFile, load_problem_file
from .report import Report
from .resources import get_fixture_path, list_fixtures
from .settings import Settings, get_settings

logger: ConcordanceLogger = get_logger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_SEMANTIC = 3


def _get_version() -> str:
    """Return package version (from metadata when installed, else settings)."""
    try:
        from importlib.metadata import (  # pylint: disable=import-outside-toplevel
            PackageNotFoundError, version)

        try:
            return version("concordance-bounds")
        except PackageNotFoundError:
            return get_settings().tool_version
    except ImportError:
        return get_settings().tool_version


def _common_options() -> argparse.ArgumentParser:
    """Flags shared by every computing subcommand."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", help="Problem file (YAML) or the name of a bundled fixture")
    common.add_argument("target", nargs="?", help="Knot, link or satellite name (default: run the file's requests)")
    common.add_argument(
        "--point",
        action="append",
        default=[],
        metavar="K/D[,K/D...]",
        help="Evaluation point, one root of unity per color; a named point from the file also works",
    )
    common.add_argument("--json", action="store_true", help="Emit the canonical JSON report")
    common.add_argument(
        "--assume-admissible",
        action="store_true",
        default=None,
        help="Accept evaluation points whose coordinates do not share one prime-power order",
    )
    common.add_argument("--enum-bound", type=int, metavar="N", help="Largest group order to enumerate")
    common.add_argument("--precision-start", type=int, metavar="BITS", help="Starting precision of the sign oracle")
    common.add_argument("--threads", type=int, metavar="N", help="Worker threads for evaluation grids")
    common.add_argument("--metrics", action="store_true", help="Log wall time and peak memory")
    common.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    common.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")
    return common


def _build_parser() -> argparse.ArgumentParser:
    """Build and return the argument parser."""
    parser = argparse.ArgumentParser(
        prog="concordance-bounds",
        description="Exact knot and link concordance invariants, Casson-Gordon obstructions "
        "and certified bounds on the 4-genus and the stabilizing number.",
    )
    parser.add_argument("-V", "--version", action="store_true", help="Print the version and exit")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    common = _common_options()

    sub.add_parser("invariants", parents=[common], help="Alexander polynomial, Arf, Levine-Tristram data")
    sub.add_parser("multisig", parents=[common], help="Multivariable signatures and the sn lower bound")
    sub.add_parser("arf", parents=[common], help="Arf invariant and a symplectic basis")
    sub.add_parser("linkingform", parents=[common], help="Linking form of the 2-fold branched cover")
    sub.add_parser("metabolizers", parents=[common], help="Enumerate metabolizers")

    cg = sub.add_parser("cg-satellite", parents=[common], help="Casson-Gordon values of a satellite")
    cg.add_argument("--character", help="Character in Smith coordinates, e.g. 1,0")
    cg.add_argument("--d", type=int, help="Prime-power level (default: the character's order)")

    rules_help = "Comma-separated rule ids to keep active"
    sn = sub.add_parser("sn-bounds", parents=[common], help="Certified sn interval with provenance")
    sn.add_argument("--rules", help=rules_help)
    sn.add_argument("--n", type=int, help="Also run the Casson-Gordon check at this stabilizing number")
    sn.add_argument("--max-candidate", type=int, help="Largest candidate the searches try")
    sn.add_argument("--sigma-minus1", type=int, help="sigma_K(-1) when no Seifert matrix is known")

    g4 = sub.add_parser("g4-check", parents=[common], help="Certified g4 interval and genus obstruction")
    g4.add_argument("--rules", help=rules_help)
    g4.add_argument("--genus", type=int, help="Also run the Casson-Gordon check at this genus")
    g4.add_argument("--max-candidate", type=int, help="Largest candidate the searches try")
    g4.add_argument("--sigma-minus1", type=int, help="sigma_K(-1) when no Seifert matrix is known")

    cob = sub.add_parser("cobordism", parents=[common], help="Nullhomologous cobordism inequality")
    cob.add_argument("--to", help="Other end of the cobordism (default: unknot)")
    cob.add_argument("--context", choices=["s4", "cp2_bar"], help="Ambient 4-manifold")

    fx = sub.add_parser("fixtures", help="List bundled demo problem files, or print one")
    fx.add_argument("name", nargs="?", help="Fixture to print")
    return parser


def _cli_params(args: argparse.Namespace) -> dict:
    """Request parameters given on the command line."""
    params = {}
    for key in ("d", "n", "genus", "max_candidate", "sigma_minus1", "to", "context"):
        value = getattr(args, key, None)
        if value is not None:
            params[key] = value
    if getattr(args, "character", None):
        params["character"] = [int(v) for v in args.character.split(",")]
    if getattr(args, "rules", None):
        params["rules"] = [r.strip() for r in args.rules.split(",") if r.strip()]
    return params


def _resolve_file(name: str) -> str:
    if os.path.exists(name) or name not in list_fixtures():
        return name
    return get_fixture_path(name)


def _settings_from(args: argparse.Namespace) -> Settings:
    return get_settings().with_overrides(
        enumeration_bound=args.enum_bound,
        precision_start_bits=args.precision_start,
        worker_threads=args.threads,
        assume_admissible=args.assume_admissible,
    )


def run(args: argparse.Namespace, settings: Settings, metrics: Optional[RunMetrics] = None) -> Report:
    """Load the problem file and run the requested computations.

    With a target the command runs once; otherwise every request of that
    command in the file runs in order, with command-line parameters taking
    precedence.
    """
    metrics = metrics or RunMetrics()
    metrics.start_phase("parse")
    path = _resolve_file(args.file)
    pf: ProblemFile = load_problem_file(path, settings)
    metrics.end_phase("parse")
    logger.success(f"Loaded {path}")

    report = Report(settings.tool_version, os.path.basename(path))
    cli = _cli_params(args)
    metrics.start_phase("compute")
    if args.target is not None:
        report.add(run_command(args.command, pf, args.target, args.point, cli, settings))
    else:
        requests = pf.requests_for(args.command)
        if not requests:
            logger.warning(f"{path} has no '{args.command}' requests")
        for req in requests:
            params = {**req.params, **cli}
            points = args.point or list(req.points)
            report.add(run_command(req.command, pf, req.target, points, params, settings))
    metrics.end_phase("compute")
    return report


def _fixtures(name: Optional[str]) -> None:
    if name is None:
        for fixture in list_fixtures():
            print(fixture)
        return
    with open(get_fixture_path(name), "r", encoding="utf-8") as f:
        sys.stdout.write(f.read())


def main(argv: Optional[list[str]] = None) -> None:
    """
    Main entry point for concordance-bounds.
    Parses arguments, runs the requested computation and prints the report
    on stdout. Exit codes: 0 ok, 2 parse error, 3 semantic error, 4 limit.
    """
    argv = sys.argv[1:] if argv is None else argv
    if "--version" in argv or "-V" in argv:
        print(_get_version())
        sys.exit(EXIT_OK)

    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        parser.print_help()
        sys.exit(EXIT_PARSE)

    try:
        if args.command == "fixtures":
            _fixtures(args.name)
            sys.exit(EXIT_OK)

        set_verbosity(args.verbose, args.quiet)
        settings = _settings_from(args)
        metrics = RunMetrics()
        logger.section(f"concordance-bounds {args.command}")
        report = run(args, settings, metrics)
        sys.stdout.write(report.render_json() if args.json else report.render_text())
        if args.metrics:
            metrics.log_summary()
        sys.exit(EXIT_OK)

    except ConcordanceError as e:
        logger.error(f"{type(e).__name__}: {e}")
        sys.exit(e.exit_code)
    except (FileNotFoundError, PermissionError) as e:
        logger.error(f"File error: {e}")
        sys.exit(EXIT_PARSE)
    except yaml.YAMLError as e:
        logger.error(f"Invalid YAML: {e}")
        sys.exit(EXIT_PARSE)
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        sys.exit(EXIT_SEMANTIC)


if __name__ == "__main__":
    main()
