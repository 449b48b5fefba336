#!/usr/bin/env python
"""
Command-line entry point for local cohomology, torsion functors and derived limits.

Usage:
    python scripts/derived_limits.py describe (--builtin NAME | --input FILE)
    python scripts/derived_limits.py h0|H0 (--builtin NAME | --input FILE) [--ideal-set SPEC]
    python scripts/derived_limits.py rational (--builtin NAME | --input FILE) [--coalgebra NAME]
    python scripts/derived_limits.py ext --source NAME --target NAME [--max-s S] [--degrees LO:HI]
    python scripts/derived_limits.py localcoh (--builtin NAME | --input FILE) --n N [--j-max J]
    python scripts/derived_limits.py product (--builtin FAMILY | --input FILE) --n N
    python scripts/derived_limits.py seqlim (--builtin TOWER | --input FILE) --n N
    python scripts/derived_limits.py tower (--builtin TOWER | --input FILE) [--milnor N]
    python scripts/derived_limits.py steenrod N
    python scripts/derived_limits.py example NAME

Common flags: --prime, --window LO:HI, --horizon-family, --horizon-tower,
--horizon-ideal, --run, --format {json,tsv,text}, --threads, --log-level.

Exit codes: 0 success, 1 refusal or mismatch, 2 input error.
"""

import os
import sys
import argparse
import logging

# Add the parent directory to the path so we can import from the app
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

import config
from pydantic import ValidationError

from app.models.schemas import SessionConfig
from app.services import commands
from app.services.errors import (
    CertificateError,
    DescriptionError,
    ExpectationMismatch,
    HypothesisRefusal,
    NotRationalError,
    PrimeMismatchError,
    StructureError,
    WindowError,
)
from app.services.loaders import resolve
from app.services.reporting import render
from app.services.towers import ComoduleFamily, Tower

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_REFUSED = 1
EXIT_INPUT = 2

REFUSALS = (HypothesisRefusal, CertificateError, NotRationalError, ExpectationMismatch)
INPUT_ERRORS = (DescriptionError, ValidationError, WindowError, PrimeMismatchError, StructureError, FileNotFoundError)


def setup_logging(level: str):
    logging.basicConfig(
        level=getattr(logging, level),
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=[
            logging.StreamHandler(sys.stderr),
            logging.FileHandler(config.LOG_FILE)
        ]
    )


def parse_range(text: str):
    """'LO:HI' (inclusive) or a comma list."""
    if ":" in text:
        lo, hi = text.split(":", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(x) for x in text.split(",") if x.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Derived limits and local cohomology of comodules")
    parser.add_argument("--prime", type=int, default=config.PRIME)
    parser.add_argument("--window", type=str, default=None, help="Default degree window LO:HI")
    parser.add_argument("--horizon-family", type=int, default=config.FAMILY_HORIZON)
    parser.add_argument("--horizon-tower", type=int, default=config.TOWER_HORIZON)
    parser.add_argument("--horizon-ideal", type=int, default=config.IDEAL_HORIZON)
    parser.add_argument("--run", type=int, default=config.STABILIZATION_RUN, help="Stabilization run length")
    parser.add_argument("--format", choices=config.OUTPUT_FORMATS, default=config.OUTPUT_FORMAT)
    parser.add_argument("--threads", type=int, default=config.THREADS)
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], default=config.LOG_LEVEL)

    sub = parser.add_subparsers(dest="command", required=True)

    def subject_args(p):
        group = p.add_mutually_exclusive_group(required=True)
        group.add_argument("--builtin", type=str, help="Name of a builtin object")
        group.add_argument("--input", type=str, help="JSON description file")

    p = sub.add_parser("describe", help="Dimensions, bounds and axiom checks")
    subject_args(p)

    for name in ("h0", "H0"):
        p = sub.add_parser(name, help=f"{name} for an ideal set")
        subject_args(p)
        p.add_argument("--ideal-set", type=str, default="grad")

    p = sub.add_parser("rational", help="Rationality of a module")
    subject_args(p)
    p.add_argument("--coalgebra", type=str, default=None)

    p = sub.add_parser("ext", help="Ext groups between two modules")
    p.add_argument("--source", type=str, required=True, help="Builtin name or JSON file")
    p.add_argument("--target", type=str, required=True, help="Builtin name or JSON file")
    p.add_argument("--max-s", type=int, default=2)
    p.add_argument("--degrees", type=str, default=None)

    p = sub.add_parser("localcoh", help="Local cohomology tower")
    subject_args(p)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--j-max", type=int, default=None)
    p.add_argument("--degrees", type=str, default=None)
    p.add_argument("--ideal-set", type=str, default="grad")

    for name in ("product", "seqlim"):
        p = sub.add_parser(name, help="Derived product of a family" if name == "product" else "Derived limit of a tower")
        subject_args(p)
        p.add_argument("--n", type=int, default=1 if name == "product" else 0)
        p.add_argument("--j-max", type=int, default=None)
        p.add_argument("--degrees", type=str, default=None)

    p = sub.add_parser("tower", help="Mittag-Leffler, Moore complex and the Milnor sequence")
    subject_args(p)
    p.add_argument("--milnor", type=int, default=None, help="Check the Milnor sequence up to this degree")
    p.add_argument("--j-max", type=int, default=None)

    p = sub.add_parser("steenrod", help="Milnor basis of A(n)")
    p.add_argument("n", type=int)

    p = sub.add_parser("example", help="Run a canned configuration against its stored outcome")
    p.add_argument("name", choices=config.CANNED_EXAMPLES + sorted(config.EXAMPLE_ALIASES))
    p.add_argument("--no-check", action="store_true", help="Skip the comparison with the stored outcome")

    return parser


def session_from_args(args) -> SessionConfig:
    fields = {
        "prime": args.prime,
        "family_horizon": args.horizon_family,
        "tower_horizon": args.horizon_tower,
        "ideal_horizon": args.horizon_ideal,
        "run": args.run,
        "output_format": args.format,
        "threads": args.threads,
    }
    if args.window:
        degrees = parse_range(args.window)
        fields["window_lo"], fields["window_hi"] = degrees[0], degrees[-1]
    return SessionConfig(**fields)


def _subject(args):
    return resolve(builtin=args.builtin, path=args.input)


def _named(text: str):
    return resolve(path=text) if text.endswith(".json") else resolve(builtin=text)


def _expect(obj, kind, what: str):
    if not isinstance(obj, kind):
        raise DescriptionError(f"{what} expected, got {type(obj).__name__}")
    return obj


def run(args, session: SessionConfig):
    degrees = parse_range(args.degrees) if getattr(args, "degrees", None) else None
    if args.command == "describe":
        return commands.cmd_describe(_subject(args), session)
    if args.command == "h0":
        return commands.cmd_h0(_subject(args), args.ideal_set, session=session)
    if args.command == "H0":
        return commands.cmd_H0(_subject(args), args.ideal_set, session=session)
    if args.command == "rational":
        return commands.cmd_rational(_subject(args), args.coalgebra, session)
    if args.command == "ext":
        return commands.cmd_ext(_named(args.source), _named(args.target), args.max_s, degrees, session)
    if args.command == "localcoh":
        return commands.cmd_localcoh(_subject(args), args.n, args.j_max, degrees, args.ideal_set, session)
    if args.command == "product":
        family = _expect(_subject(args), ComoduleFamily, "a family")
        return commands.cmd_product(family, args.n, args.j_max, degrees, session)
    if args.command == "seqlim":
        tower = _expect(_subject(args), Tower, "a tower")
        return commands.cmd_seqlim(tower, args.n, args.j_max, degrees, session)
    if args.command == "tower":
        tower = _expect(_subject(args), Tower, "a tower")
        return commands.cmd_tower(tower, args.milnor, args.j_max, session)
    if args.command == "steenrod":
        return commands.cmd_steenrod_table(args.n, session)
    if args.command == "example":
        return commands.cmd_example(args.name, session, check=not args.no_check)
    raise DescriptionError(f"unknown command {args.command}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(args.log_level)

    try:
        session = session_from_args(args)
        report = run(args, session)
    except REFUSALS as e:
        logger.error(f"Refused: {e}")
        print(f"refused: {e}", file=sys.stderr)
        return EXIT_REFUSED
    except INPUT_ERRORS as e:
        logger.error(f"Input error: {e}")
        print(f"input error: {e}", file=sys.stderr)
        return EXIT_INPUT

    sys.stdout.write(render(report, session.output_format))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
