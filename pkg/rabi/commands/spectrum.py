from __future__ import annotations

import argparse
import logging
import math
from typing import Any

from rabi.commands.base import Command, RunConfig, first_failure, parse_grid, positive_int
from rabi.config import Settings
from rabi.models import ModelParams
from rabi.output import Table
from rabi.services.gfunction import SpectrumResult, spectrum
from rabi.utils.workers import run_jobs

log = logging.getLogger(__name__)

METHODS = ("auto", "groot", "oracle")


def spectrum_point(params: ModelParams, E_max: float | None, settings: Settings, method: str) -> SpectrumResult:
    return spectrum(params, E_max, settings=settings, method=method)


class SpectrumCommand(Command):
    name = "spectrum"
    help = "Parity-labelled energy levels as a function of the coupling"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--g-range", dest="g_range", default=None, help="Coupling sweep a:b:n (defaults to --g)")
        parser.add_argument("--E-max", dest="E_max", type=float, default=None, help="Upper energy bound (model frame)")
        parser.add_argument("--n-levels", dest="n_levels", type=positive_int, default=None)
        parser.add_argument("--method", choices=METHODS, default="auto")

    def settings_overrides(self, args: argparse.Namespace) -> dict[str, Any]:
        return {"n_levels": args.n_levels} if args.n_levels is not None else {}

    async def run(self, cfg: RunConfig) -> Table:
        options = cfg.options
        couplings = [cfg.g] if options["g_range"] is None else parse_grid(options["g_range"], "--g-range").tolist()
        jobs = [(cfg.params(g=g), options["E_max"], cfg.settings, options["method"]) for g in couplings]
        results = await run_jobs(spectrum_point, jobs, cfg.settings.jobs)

        table = Table(
            cfg.header(self.name, g_range=options["g_range"] or "", method=options["method"]),
            ["g", "E", "parity", "source", "residual"],
        )
        failures = 0
        for g, result in zip(couplings, results):
            if isinstance(result, BaseException):
                failures += 1
                log.warning("spectrum at g=%r failed: %s", g, result)
                continue
            for level in result.levels:
                table.add(g, level.E, level.parity, level.source, level.residual)
            for E in result.baselines:
                table.add(g, E, "", "baseline", math.nan)
            for note in result.notes:
                log.warning("g=%r: %s", g, note)

        if failures == len(couplings):
            failure = first_failure(results)
            if failure is not None:
                raise failure
        log.info("spectrum: %s coupling point(s), %s failed", len(couplings), failures)
        return table
