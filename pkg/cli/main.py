#!/usr/bin/env python3
"""
bohmq command line.

    python bohmq.py solve1d --config box.ini
    python bohmq.py solve-central --config hydrogen.ini --out results/h
    python bohmq.py verify --state results/h/state
    python bohmq.py trajectory --config harmonic.ini --classical
    python bohmq.py reproduce --out results/reproduce

Exit codes: 0 success, 1 usage or configuration error, 2 solver failure,
3 diagnostic failure.
"""

import argparse
import sys
import uuid
from pathlib import Path
from typing import List, Optional

from rich.console import Console
from rich.markup import escape

from core.config import get_settings
from core.exceptions import QuantizationError
from core.observability import StructuredLogger, configure_logging, run_id_var

from . import commands
from .config_file import Command, RunConfig, load_run_config
from .reproduce import reproduce

logger = StructuredLogger("cli")

EXIT_USAGE = 1
EXIT_INTERNAL = 2


class UsageError(Exception):
    pass


class ArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors raised instead of exiting with status 2."""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="bohmq", description="Bohmian quantization by shooting and continuity")
    parser.add_argument("command", nargs="?", choices=[c.value for c in Command],
                        help="command to run; defaults to run.command of the config file")
    parser.add_argument("--config", type=Path, help="run configuration file (key = value with [sections])")
    parser.add_argument("--out", type=Path, help="output directory")
    parser.add_argument("--hbar", type=float)
    parser.add_argument("--mass", type=float)
    parser.add_argument("--classical", action="store_true", help="switch the quantum potential off")
    parser.add_argument("--tol", type=float, help="bisection tolerance")
    parser.add_argument("--seed", type=int, help="seed for sample-point selection")
    parser.add_argument("--state", type=Path, help="state bundle directory for verify")
    return parser


def resolve_config(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config) if args.config else RunConfig()
    return config.with_overrides(hbar=args.hbar, mass=args.mass, tol=args.tol, seed=args.seed,
                                 classical=args.classical, out=args.out)


def dispatch(command: Command, config: RunConfig, args: argparse.Namespace, console: Console) -> int:
    if command is Command.SOLVE1D:
        return commands.solve1d(config, console)
    if command is Command.SOLVE_CENTRAL:
        return commands.solve_central_command(config, console)
    if command is Command.VERIFY:
        return commands.verify(config, console, args.state)
    if command is Command.TRAJECTORY:
        return commands.trajectory(config, console)
    return reproduce(config, console)


def main(argv: Optional[List[str]] = None, console: Optional[Console] = None) -> int:
    console = console or Console()
    settings = get_settings()
    level = "DEBUG" if settings.debug else settings.observability.log_level
    configure_logging(level, settings.observability.log_format.value)
    run_id_var.set(uuid.uuid4().hex[:12])

    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args)
        command = Command(args.command) if args.command else config.run.command
        if command is None:
            raise UsageError("bohmq: no command given and run.command is not set in the config")
        if args.state is not None and command is not Command.VERIFY:
            raise UsageError("bohmq: --state is only accepted by verify")
        logger.info("Run started", command=command.value, out=str(config.run.out), seed=config.run.seed,
                    environment=settings.environment.value)
        status = dispatch(command, config, args, console)
        logger.info("Run finished", command=command.value, status=status)
        return status
    except UsageError as exc:
        console.print(f"[red]error:[/red] {escape(str(exc))}")
        return EXIT_USAGE
    except QuantizationError as exc:
        logger.error("Run failed", exc_info=exc, category=exc.category.value)
        console.print(f"[red]error:[/red] {escape(exc.message)}")
        if exc.recovery_hint:
            console.print(f"hint: {escape(exc.recovery_hint)}")
        return exc.exit_code
    except OSError as exc:
        logger.error("I/O failure", exc_info=exc)
        console.print(f"[red]error:[/red] {escape(str(exc))}")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
