"""Command-line interface for the metaplectic theta toolkit.

One binary, one subcommand per capability. Every command prints a
versioned JSON payload (or a plain-text rendering of it with
``--mode text``) and exits 0 iff all of its verdicts pass.
"""

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional

from dotenv import load_dotenv

from src.config import Settings, get_settings
from src.constants import (
    APP_DESCRIPTION,
    APP_NAME,
    APP_VERSION,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    ConfigVariant,
    LogAction,
    OutputMode,
)
from src.exceptions import (
    ConfigurationError,
    InvalidParameterError,
    MetaplecticError,
)
from src.exchange_derivation import (
    check_trace,
    classify_rank,
    derive_exchange_trace,
    derive_orbit_trace,
)
from src.jacquet_dimensions import evaluate_semi_whittaker, final_formula_dim, wss_check
from src.logging_config import MetaplecticLogger, get_logger
from src.metaplectic_cocycle import (
    check_block_compatibility_exhaustive,
    check_cocycle_identity,
    make_params,
)
from src.models import with_schema
from src.partitions_orbits import orbit_config, orbit_data, theta_orbit
from src.services import SuiteService, TraceService
from src.tame_local_field import hilbert, make_field
from src.torus_cover import (
    LEVI_SUBGROUP_NAMES,
    SUBGROUP_NAMES,
    CoverGroup,
    build_cover,
    center_bruteforce,
    index,
    is_abelian,
    is_maximal_abelian,
    named_subgroup,
)
from src.utils.parsing import (
    cover_degree,
    non_negative_int,
    parse_block_dims,
    parse_check_mode,
    parse_composition,
    parse_element,
    parse_partition,
    positive_int,
)

# Load environment variables
load_dotenv()

CommandResult = tuple[dict[str, Any], bool]

ALL_SUBGROUP_NAMES = SUBGROUP_NAMES + LEVI_SUBGROUP_NAMES

EPILOG = """
Examples:

  # Orbit attached to the rank 7 theta representation of the 3-fold cover
  metaplectic theta-orbit --n 3 --r 7

  # Semi-Whittaker dimension for the composition (2,2)
  metaplectic jacquet-dim --n 2 --q 3 --c 0 --lambda 2,2

  # Derive, save and re-check a vanishing trace
  metaplectic exchange-trace --n 2 --orbit 3,1 --emit trace.json
  metaplectic check-trace trace.json

  # Full acceptance battery on 4 threads with a JSON report
  metaplectic --mode text suite --workers 4 --report suite.json
"""


# ============================================================================
# Command handlers
# ============================================================================


def _cover_args(args: argparse.Namespace, r: int) -> CoverGroup:
    return build_cover(make_params(args.n, args.q, args.c, r))


def cmd_theta_orbit(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Print the theta orbit with its WSS-type certificate."""
    orbit = theta_orbit(args.n, args.r)
    certificate = wss_check(args.n, args.r)
    return {
        "n": args.n,
        "r": args.r,
        "orbit": orbit.to_json(),
        "wss": certificate.model_dump(exclude_none=True),
    }, True


def cmd_orbit_data(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Print both weight vectors and the V_2, U_O and U'_O root sets."""
    payload = orbit_data(args.orbit)
    payload["v2_size"] = len(orbit_config(args.orbit, ConfigVariant.V2))
    return payload, True


def cmd_hilbert(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Evaluate one tame Hilbert symbol.

    Called via: metaplectic hilbert --n 2 --q 3 --x 1,0 --y 1,0
    """
    field = make_field(args.n, args.q)
    exponent = hilbert(field, args.x, args.y)
    return {
        "n": args.n,
        "q": args.q,
        "x": args.x.model_dump(),
        "y": args.y.model_dump(),
        "exponent": exponent,
    }, True


def cmd_cocycle_check(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Verify the cocycle identity, exhaustively or on a seeded sample.

    The seed comes from the global --seed (before or after the subcommand)
    and falls back to METAPLECTIC_DEFAULT_SEED.
    """
    mode, k = args.check_mode
    p = make_params(args.n, args.q, args.c, args.r)
    report = check_cocycle_identity(p, mode, k=k, seed=args.seed)
    return report.to_payload(), report.passed


def cmd_block_compat(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Verify block compatibility for every pair of class vectors."""
    p = make_params(args.n, args.q, args.c, args.composition.r)
    report = check_block_compatibility_exhaustive(p, args.composition)
    return report.to_payload(), report.passed


def cmd_torus_center(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Report the center next to its brute-force recomputation."""
    G = _cover_args(args, args.r)
    center = named_subgroup(G, "center")
    brute = center_bruteforce(G)
    orders = {"center": center.order, "center_bruteforce": brute.order}
    verdicts = {"center_matches_bruteforce": center.same_members(brute)}
    if args.levi is not None:
        levi_center = named_subgroup(G, "levi_center", args.levi)
        orders["levi_center"] = levi_center.order
        verdicts["levi_center_equals_center"] = levi_center.same_members(center)
    return {
        "order": G.order,
        "subgroup_orders": orders,
        "verdicts": verdicts,
    }, all(verdicts.values())


def cmd_max_abelian(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    G = _cover_args(args, args.r)
    subgroup = named_subgroup(G, args.name, args.levi)
    ambient = named_subgroup(G, args.ambient, args.levi)
    verdicts = {
        "abelian": is_abelian(G, subgroup),
        "maximal_abelian": is_maximal_abelian(G, subgroup, ambient),
    }
    return {
        "order": G.order,
        "subgroups": [s.summary().model_dump() for s in (subgroup, ambient)],
        "verdicts": verdicts,
    }, all(verdicts.values())


def cmd_index(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    G = _cover_args(args, args.r)
    numerator = named_subgroup(G, args.num, args.levi)
    denominator = named_subgroup(G, args.den, args.levi)
    return {
        "order": G.order,
        "subgroups": [s.summary().model_dump() for s in (numerator, denominator)],
        "index": index(numerator, denominator),
    }, True


def cmd_jacquet_dim(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Evaluate the semi-Whittaker dimension formula.

    With --cross-check the final formula, computed through maximal
    abelian subgroups, is reported too and must agree.
    """
    report = evaluate_semi_whittaker(
        args.n, args.q, args.c, args.composition, block_dims=args.block_dims
    )
    payload = report.to_payload()
    ok = True
    if args.cross_check:
        other = final_formula_dim(
            args.n, args.q, args.c, args.composition, block_dims=args.block_dims
        )
        payload["final_formula"] = other.to_payload()
        ok = other == report.dim
    return payload, ok


def cmd_exchange_trace(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Derive a trace, check it and optionally save it with --emit.

    Raises:
        InvalidParameterError: If --n is missing without --exchange-only
    """
    if args.exchange_only:
        trace = derive_exchange_trace(args.orbit)
    else:
        if args.n is None:
            raise InvalidParameterError(
                "--n is required unless --exchange-only", parameter="n"
            )
        trace = derive_orbit_trace(args.n, args.orbit, allow_general=args.allow_general)
    result = check_trace(trace)
    logger.info(
        "Trace derived",
        action=LogAction.TRACE,
        orbit=str(args.orbit),
        steps=len(trace.steps),
        status=str(trace.terminal.status),
    )
    if args.emit is not None:
        TraceService(settings, logger).save(trace, args.emit)
    payload = trace.to_json()
    payload["check"] = result.to_payload()
    return payload, result.ok


def cmd_check_trace(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Re-verify a trace file written by exchange-trace --emit.

    Raises:
        TraceFormatError: If the file is not a readable trace
    """
    trace, result = TraceService(settings, logger).check_file(args.file)
    payload = result.to_payload()
    payload["status"] = str(trace.terminal.status)
    payload["steps"] = len(trace.steps)
    return payload, result.ok


def cmd_classify(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    rows = classify_rank(args.n, args.r)
    return {
        "n": args.n,
        "r": args.r,
        "orbits": [row.model_dump(mode="json") for row in rows],
    }, all(row.trace_ok for row in rows)


def cmd_suite(
    args: argparse.Namespace, settings: Settings, logger: MetaplecticLogger
) -> CommandResult:
    """Run the acceptance battery.

    Called via: metaplectic --mode text suite --workers 4 --report out.json
    """
    service = SuiteService(settings, logger)
    report = service.run(
        workers=args.workers,
        progress=args.mode is OutputMode.TEXT,
        report_path=args.report,
    )
    if args.mode is OutputMode.TEXT:
        report.print_summary()
    return report.to_payload(), report.passed


# ============================================================================
# Parser
# ============================================================================


def _add_cover_flags(parser: argparse.ArgumentParser, with_r: bool = True) -> None:
    parser.add_argument("--n", type=cover_degree, required=True, help="Cover degree")
    parser.add_argument(
        "--q", type=positive_int, required=True, help="Residue field size"
    )
    parser.add_argument("--c", type=non_negative_int, default=0, help="Twisting class")
    if with_r:
        parser.add_argument("--r", type=positive_int, required=True, help="Rank")


def _add_global_flags(parser: argparse.ArgumentParser, with_mode: bool) -> None:
    """Accept --seed (and --mode) after the subcommand too.

    SUPPRESS leaves the value parsed before the subcommand in place when
    the flag is not repeated. cocycle-check keeps --mode for its check mode.
    """
    parser.add_argument(
        "--seed", type=non_negative_int, default=argparse.SUPPRESS, help="Sampling seed"
    )
    if with_mode:
        parser.add_argument(
            "--mode",
            type=OutputMode,
            choices=list(OutputMode),
            default=argparse.SUPPRESS,
            help="Output format",
        )


def build_parser() -> argparse.ArgumentParser:
    """Build the top-level parser with one subparser per command."""
    parser = argparse.ArgumentParser(
        prog="metaplectic",
        description=APP_DESCRIPTION,
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {APP_VERSION}"
    )
    parser.add_argument(
        "--mode",
        type=OutputMode,
        choices=list(OutputMode),
        default=OutputMode.JSON,
        help="Output format",
    )
    parser.add_argument(
        "--seed", type=non_negative_int, default=None, help="Seed for sampling modes"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("theta-orbit", help="Orbit attached to a theta representation")
    p.add_argument("--n", type=cover_degree, required=True)
    p.add_argument("--r", type=positive_int, required=True)
    p.set_defaults(handler=cmd_theta_orbit)

    p = sub.add_parser("orbit-data", help="Weight vectors and root sets of an orbit")
    p.add_argument("--orbit", type=parse_partition, required=True)
    p.set_defaults(handler=cmd_orbit_data)

    p = sub.add_parser("hilbert", help="Tame Hilbert symbol exponent")
    p.add_argument("--n", type=cover_degree, required=True)
    p.add_argument("--q", type=positive_int, required=True)
    p.add_argument("--x", type=parse_element, required=True, help="v,u")
    p.add_argument("--y", type=parse_element, required=True, help="v,u")
    p.set_defaults(handler=cmd_hilbert)

    p = sub.add_parser("cocycle-check", help="Verify the torus cocycle identity")
    _add_cover_flags(p)
    p.add_argument(
        "--mode",
        dest="check_mode",
        type=parse_check_mode,
        default=parse_check_mode("exhaustive"),
        help="exhaustive or sample=K",
    )
    p.set_defaults(handler=cmd_cocycle_check)

    p = sub.add_parser("block-compat", help="Verify block compatibility of the cocycle")
    _add_cover_flags(p, with_r=False)
    p.add_argument(
        "--lambda", dest="composition", type=parse_composition, required=True
    )
    p.set_defaults(handler=cmd_block_compat)

    p = sub.add_parser("torus-center", help="Center of the torus cover")
    _add_cover_flags(p)
    p.add_argument("--levi", type=parse_composition, default=None)
    p.set_defaults(handler=cmd_torus_center)

    p = sub.add_parser("max-abelian", help="Maximal abelian test for a named subgroup")
    _add_cover_flags(p)
    p.add_argument("--name", choices=ALL_SUBGROUP_NAMES, required=True)
    p.add_argument("--ambient", choices=ALL_SUBGROUP_NAMES, default="full")
    p.add_argument("--levi", type=parse_composition, default=None)
    p.set_defaults(handler=cmd_max_abelian)

    p = sub.add_parser("index", help="Index of one named subgroup in another")
    _add_cover_flags(p)
    p.add_argument("--num", choices=ALL_SUBGROUP_NAMES, required=True)
    p.add_argument("--den", choices=ALL_SUBGROUP_NAMES, required=True)
    p.add_argument("--levi", type=parse_composition, default=None)
    p.set_defaults(handler=cmd_index)

    p = sub.add_parser("jacquet-dim", help="Semi-Whittaker functional dimension")
    _add_cover_flags(p, with_r=False)
    p.add_argument(
        "--lambda", dest="composition", type=parse_composition, required=True
    )
    p.add_argument(
        "--block-dims",
        type=parse_block_dims,
        default=None,
        help="Known block Whittaker dimensions, e.g. 0=1,1=2",
    )
    p.add_argument(
        "--cross-check",
        action="store_true",
        help="Also evaluate the formula through the square-class subgroups",
    )
    p.set_defaults(handler=cmd_jacquet_dim)

    p = sub.add_parser("exchange-trace", help="Derive a vanishing/nonvanishing trace")
    p.add_argument("--n", type=cover_degree, default=None)
    p.add_argument("--orbit", type=parse_partition, required=True)
    p.add_argument("--emit", type=Path, default=None, help="Write the trace to a file")
    p.add_argument("--exchange-only", action="store_true")
    p.add_argument("--allow-general", action="store_true")
    p.set_defaults(handler=cmd_exchange_trace)

    p = sub.add_parser("check-trace", help="Re-verify a saved trace")
    p.add_argument("file", type=Path)
    p.set_defaults(handler=cmd_check_trace)

    p = sub.add_parser("classify", help="Vanishing status of every orbit of GL(r)")
    p.add_argument("--n", type=cover_degree, required=True)
    p.add_argument("--r", type=positive_int, required=True)
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("suite", help="Run the acceptance battery")
    p.add_argument("--workers", type=positive_int, default=None)
    p.add_argument("--report", type=Path, default=None)
    p.set_defaults(handler=cmd_suite)

    for name, subparser in sub.choices.items():
        _add_global_flags(subparser, with_mode=name != "cocycle-check")
    return parser


# ============================================================================
# Output
# ============================================================================


def render_text(payload: dict[str, Any], ok: bool) -> str:
    """Plain-text rendering; carries the same verdict as the JSON form."""
    lines = []
    for key, value in payload.items():
        if isinstance(value, (dict, list)):
            value = json.dumps(value, ensure_ascii=False)
        lines.append(f"{key}: {value}")
    lines.append("✅ PASS" if ok else "❌ FAIL")
    return "\n".join(lines)


def _emit(payload: dict[str, Any], ok: bool, mode: OutputMode) -> None:
    if mode is OutputMode.TEXT:
        print(render_text(payload, ok))
    else:
        print(json.dumps(payload, indent=2, ensure_ascii=False))


# ============================================================================
# Entry points
# ============================================================================


def _cover_context(args: argparse.Namespace) -> dict[str, int]:
    """Cover parameters given on the command line, for log context."""
    return {
        key: getattr(args, key)
        for key in ("n", "q", "c", "r")
        if getattr(args, key, None) is not None
    }


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse argv, dispatch and return the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    try:
        settings = get_settings()
    except ConfigurationError as e:
        print(json.dumps(e.to_payload(), ensure_ascii=False))
        return EXIT_FAILURE
    logger = get_logger(settings)
    logger.context_filter.set_context(command=args.command, **_cover_context(args))
    logger.debug(f"{APP_NAME} {APP_VERSION}", action=LogAction.STARTUP)

    try:
        payload, ok = args.handler(args, settings, logger)
    except InvalidParameterError as e:
        print(json.dumps(e.to_payload(), ensure_ascii=False))
        return EXIT_USAGE
    except MetaplecticError as e:
        logger.error("Command failed", error=str(e))
        print(json.dumps(e.to_payload(), ensure_ascii=False))
        return EXIT_FAILURE
    except KeyboardInterrupt:
        logger.warning("Cancelled by user", action=LogAction.SHUTDOWN)
        return 130
    else:
        logger.info("Command finished", action=LogAction.SUCCESS, ok=ok)
    finally:
        logger.context_filter.clear_context()

    if args.command == "suite" and args.mode is OutputMode.TEXT:
        return EXIT_OK if ok else EXIT_FAILURE
    _emit(with_schema(payload) if "schema" not in payload else payload, ok, args.mode)
    return EXIT_OK if ok else EXIT_FAILURE


def main() -> None:
    """Console script entry point: ``metaplectic``."""
    sys.exit(run())


if __name__ == "__main__":
    main()
