"""CLI entrypoint for resilgrid."""
import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

import yaml
from pydantic import ValidationError

from resilgrid import __version__
from resilgrid.core.exceptions import (
    ConfigurationError,
    InputValidationError,
    SafetyAssertionError,
    SolverError,
)
from resilgrid.core.utils.logger import configure_logging, get_logger

logger = get_logger("cli")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_UNSAFE = 4


def _add_common(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="Path to a YAML scenario config")
    sub.add_argument("--preset", help="Bundled preset to start from")
    sub.add_argument("--out", help="Output directory (overrides output.directory)")
    sub.add_argument("--seed", type=int, help="Seed for random initial perturbations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="resilgrid",
        description="resilgrid: botnet-driven load attacks on power grid frequency",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    parser.add_argument(
        "--dump-preset", metavar="NAME", help="Print a bundled preset as YAML and exit"
    )
    parser.add_argument("--list-presets", action="store_true", help="List bundled presets")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="Warnings and errors only")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    epidemic = subparsers.add_parser("epidemic", help="SIS transients and steady states")
    _add_common(epidemic)
    epidemic.add_argument("--jobs", type=int, default=1, help="Worker threads for the sweep")

    cyber = subparsers.add_parser("cyber-ne", help="Best responses and cyber Nash equilibrium")
    _add_common(cyber)
    cyber.add_argument("--jobs", type=int, default=1, help="Worker threads for BR curves")

    run = subparsers.add_parser("run", help="Simulate a staged attack scenario")
    _add_common(run)
    run.add_argument(
        "--assert", dest="assert_safe", action="store_true",
        help="Exit with code 4 if any generator leaves the frequency band",
    )

    validate = subparsers.add_parser("validate", help="Check a config and print diagnostics")
    _add_common(validate)
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    extra: Dict[str, Any] = {}
    if getattr(args, "seed", None) is not None:
        extra["scenario"] = {"initial": {"seed": args.seed}}
    return extra


def _dump_preset(name: str) -> None:
    from resilgrid.core.presets import get_preset

    print(yaml.safe_dump(get_preset(name), sort_keys=False), end="")


def _dispatch(args: argparse.Namespace) -> int:
    from resilgrid.cli import commands
    from resilgrid.cli.config import resolve_config

    config = resolve_config(args.preset, args.config, _overrides(args))
    if args.command == "epidemic":
        written = commands.cmd_epidemic(config, args.out, jobs=max(1, args.jobs))
    elif args.command == "cyber-ne":
        written = commands.cmd_cyber_ne(config, args.out, jobs=max(1, args.jobs))
    elif args.command == "run":
        written = commands.cmd_run(config, args.out, assert_safe=args.assert_safe)
    else:
        report = commands.cmd_validate(config)
        return EXIT_OK if report.ok else EXIT_CONFIG
    for path in written:
        print(path)
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.verbose:
        configure_logging(logging.DEBUG)
    elif args.quiet:
        configure_logging(logging.WARNING)

    try:
        if args.dump_preset:
            _dump_preset(args.dump_preset)
            return EXIT_OK
        if args.list_presets:
            from resilgrid.core.presets import list_aliases, list_presets

            print("\n".join(list_presets()))
            for alias, name in list_aliases().items():
                print(f"{alias} -> {name}")
            return EXIT_OK
        if args.command is None:
            parser.print_help()
            return EXIT_OK
        return _dispatch(args)
    except (ConfigurationError, InputValidationError, ValidationError) as exc:
        print(f"Config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SafetyAssertionError as exc:
        print(f"Safety assertion failed: {exc}", file=sys.stderr)
        return EXIT_UNSAFE
    except SolverError as exc:
        print(f"Solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
