from __future__ import annotations

import argparse
import logging
from typing import Any

from rabi.commands.base import Command, RunConfig, first_failure, parse_int_range, positive_float, positive_int
from rabi.output import Table
from rabi.services.algebra import map_realization
from rabi.services.isolated import find_isolated
from rabi.utils.workers import run_jobs

log = logging.getLogger(__name__)


class IsolatedCommand(Command):
    name = "isolated"
    help = "Exact isolated solutions (g*, E*) on the baselines E = beta (k + M)"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--M", dest="M", default="1..3", help="Baseline indices a..b (inclusive)")
        parser.add_argument("--grid", type=positive_int, default=None, help="Coupling scan points over (0, omega/2)")
        parser.add_argument("--tol", type=positive_float, default=None, help="Bisection tolerance in g")

    def settings_overrides(self, args: argparse.Namespace) -> dict[str, Any]:
        overrides: dict[str, Any] = {}
        if args.grid is not None:
            overrides["isolated_grid"] = args.grid
        if args.tol is not None:
            overrides["isolated_tol"] = args.tol
        return overrides

    async def run(self, cfg: RunConfig) -> Table:
        indices = parse_int_range(cfg.options["M"], "--M")
        # g is not needed here; use 1.0 to read off the coupling scale of the realization
        unified, shift = map_realization(cfg.params(g=1.0))
        g_scale = unified.g

        settings = cfg.settings
        jobs = [
            (M, unified.k, unified.epsilon, unified.omega, settings.isolated_grid, settings.isolated_tol, False)
            for M in indices
        ]
        results = await run_jobs(find_isolated, jobs, settings.jobs)
        failure = first_failure(results)
        if failure is not None:
            raise failure

        table = Table(cfg.header(self.name, M=cfg.options["M"]), ["k", "M", "g", "E"])
        for solutions in results:
            for sol in solutions:
                table.add(str(sol.k), sol.M, sol.g_star / g_scale, sol.E_star - shift)
        if not table.rows:
            log.warning("no isolated solutions for k=%s on M=%s", cfg.k, cfg.options["M"])
        else:
            log.info("%s isolated solution(s) for k=%s", len(table.rows), cfg.k)
        return table
