from __future__ import annotations

import argparse
import logging
from typing import Any

from rabi.commands.base import Command, RunConfig, positive_int
from rabi.output import Table
from rabi.services.oracle import BASES, SIGMA_Z, certify
from rabi.utils.errors import UsageError

log = logging.getLogger(__name__)


class DiagCommand(Command):
    name = "diag"
    help = "Truncated-basis diagonalization with parity labels and a truncation check"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--N", dest="N", type=positive_int, default=None, help="Ladder states per spin branch")
        parser.add_argument("--n-lowest", dest="n_lowest", type=positive_int, default=None)
        parser.add_argument("--basis", choices=BASES, default=SIGMA_Z)

    def settings_overrides(self, args: argparse.Namespace) -> dict[str, Any]:
        overrides: dict[str, Any] = {}
        if args.N is not None:
            overrides["truncation"] = args.N
        if args.n_lowest is not None:
            overrides["n_levels"] = args.n_lowest
        return overrides

    async def run(self, cfg: RunConfig) -> Table:
        settings = cfg.settings
        N = settings.truncation
        if N < 4:
            raise UsageError(f"--N must be at least 4, got {N}")
        report = certify(
            cfg.params(),
            N // 2,
            N,
            settings.convergence_tol,
            n_lowest=settings.n_levels,
            basis=cfg.options["basis"],
        )
        header = cfg.header(
            self.name,
            basis=cfg.options["basis"],
            N_compare=N // 2,
            converged=report.converged,
            max_delta=report.max_delta,
        )
        log.info("diag N=%s basis=%s: %s level(s), converged=%s", N, cfg.options["basis"], len(report.levels), report.converged)
        table = Table(header, ["index", "E", "parity", "delta"])
        for index, ((E, parity), delta) in enumerate(zip(report.levels, report.deltas)):
            table.add(index, E, parity, delta)
        return table
