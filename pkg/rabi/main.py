from __future__ import annotations

import argparse
import logging
from collections.abc import Sequence
from dataclasses import replace
from pathlib import Path
from typing import Any

from rabi import __version__
from rabi.commands.base import Command, RunConfig, bargmann_index, positive_int
from rabi.commands.coeffs import CoefficientsCommand
from rabi.commands.diag import DiagCommand
from rabi.commands.gfun import GFunctionCommand
from rabi.commands.isolated import IsolatedCommand
from rabi.commands.spectrum import SpectrumCommand
from rabi.config import Settings, apply_config, load_settings, read_config_file
from rabi.logging import set_level
from rabi.models import Realization
from rabi.output import FORMATS, write_table
from rabi.utils.errors import ConfigError, ParameterError, RabiError, UsageError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERICAL = 2


class CliParser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(message)


def _shared_arguments() -> argparse.ArgumentParser:
    shared = CliParser(add_help=False)
    group = shared.add_argument_group("model")
    group.add_argument("--epsilon", type=float, default=1.0, help="Two-level splitting")
    group.add_argument("--omega", type=float, default=1.0, help="Bosonic frequency (model frame)")
    group.add_argument("--g", type=float, default=0.4, help="Coupling (model frame)")
    group.add_argument("--k", type=bargmann_index, default=bargmann_index("1/2"), help="Bargmann index, e.g. 1/4")
    group.add_argument("--realization", choices=[r.value for r in Realization], default=Realization.UNIFIED.value)

    io = shared.add_argument_group("output")
    io.add_argument("--format", dest="fmt", choices=FORMATS, default="csv")
    io.add_argument("--out", type=Path, default=None, help="Output file (stdout when omitted)")
    io.add_argument("--jobs", type=positive_int, default=None, help="Worker processes")
    io.add_argument("--config", type=Path, default=None, help="key=value settings file")
    io.add_argument("--log-level", dest="log_level", default=None)
    return shared


def default_commands() -> list[Command]:
    return [IsolatedCommand(), SpectrumCommand(), GFunctionCommand(), CoefficientsCommand(), DiagCommand()]


class RabiCli:
    def __init__(self, settings: Settings | None = None, commands: Sequence[Command] | None = None) -> None:
        self.settings = settings
        self.commands = {command.name: command for command in (commands or default_commands())}
        self.parser = self._build_parser()

    def _build_parser(self) -> CliParser:
        parser = CliParser(prog="rabi", description="Spectral solver for the su(1,1) nonlinear Rabi models")
        parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
        shared = _shared_arguments()
        sub = parser.add_subparsers(dest="command", metavar="COMMAND", required=True)
        for command in self.commands.values():
            command.add_arguments(sub.add_parser(command.name, help=command.help, parents=[shared]))
        return parser

    def _settings(self, args: argparse.Namespace, command: Command) -> Settings:
        settings = self.settings or load_settings()
        if args.config:
            settings = apply_config(settings, read_config_file(args.config))
        overrides: dict[str, Any] = dict(command.settings_overrides(args))
        if args.jobs is not None:
            overrides["jobs"] = args.jobs
        if args.log_level is not None:
            overrides["log_level"] = args.log_level.upper()
        return replace(settings, **overrides)

    async def run(self, argv: Sequence[str] | None = None) -> int:
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as exc:
            # --help / --version
            return int(exc.code or 0)
        except UsageError as exc:
            log.error("usage: %s", exc)
            return EXIT_USAGE

        command = self.commands[args.command]
        try:
            settings = self._settings(args, command)
            set_level(settings.log_level)
            cfg = RunConfig(
                epsilon=args.epsilon,
                omega=args.omega,
                g=args.g,
                k=args.k,
                realization=Realization(args.realization),
                settings=settings,
                fmt=args.fmt,
                out=args.out,
                options=vars(args),
            )
            table = await command.run(cfg)
            write_table(table, cfg.fmt, cfg.out)
        except (UsageError, ParameterError, ConfigError) as exc:
            log.error("%s: %s", command.name, exc)
            return EXIT_USAGE
        except RabiError as exc:
            log.error("%s failed: %s", command.name, exc)
            return EXIT_NUMERICAL
        except Exception:
            log.exception("%s: unexpected failure", command.name)
            return EXIT_NUMERICAL

        log.info("%s: wrote %s row(s)", command.name, len(table.rows))
        return EXIT_OK


def create_cli(settings: Settings | None = None) -> RabiCli:
    return RabiCli(settings)


async def main(argv: Sequence[str] | None = None, settings: Settings | None = None) -> int:
    return await create_cli(settings).run(argv)
