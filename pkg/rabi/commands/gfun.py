from __future__ import annotations

import argparse
import logging

import numpy as np

from rabi.commands.base import Command, RunConfig, first_failure, parse_grid, parse_parity
from rabi.config import Settings
from rabi.models import ModelParams, Parity
from rabi.output import Table, format_number
from rabi.services.algebra import map_realization
from rabi.services.gfunction import GFunction, median_normalize
from rabi.utils.workers import run_jobs

log = logging.getLogger(__name__)


def grid_chunk(params: ModelParams, settings: Settings, energies: list[float]) -> tuple[list, list, list]:
    even, odd, masked = GFunction(params, settings).grid(np.asarray(energies))
    return even.tolist(), odd.tolist(), masked.tolist()


class GFunctionCommand(Command):
    name = "gfun"
    help = "G-function on an energy grid, with pole windows flagged and its roots"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--E-range", dest="E_range", required=True, help="Energy grid a:b:n (model frame)")
        parser.add_argument("--parity", choices=("even", "odd", "both"), default="both")
        parser.add_argument(
            "--normalize",
            action=argparse.BooleanOptionalAction,
            default=True,
            help="Divide each G column by its median |G| over unmasked points",
        )

    async def run(self, cfg: RunConfig) -> Table:
        energies = parse_grid(cfg.options["E_range"], "--E-range")
        parities = parse_parity(cfg.options["parity"])
        unified, shift = map_realization(cfg.params())
        gfun = GFunction(unified, cfg.settings)
        shifted = energies + shift

        chunks = [chunk.tolist() for chunk in np.array_split(shifted, max(1, cfg.settings.jobs)) if chunk.size]
        results = await run_jobs(grid_chunk, [(unified, cfg.settings, chunk) for chunk in chunks], cfg.settings.jobs)
        failure = first_failure(results)
        if failure is not None:
            raise failure
        masked = [v for part in results for v in part[2]]
        columns_by_parity: dict[Parity, list[float]] = {}
        scales: dict[str, float] = {}
        for parity, index in ((Parity.EVEN, 0), (Parity.ODD, 1)):
            raw = [v for part in results for v in part[index]]
            if cfg.options["normalize"] and parity in parities:
                values, scale = median_normalize(np.asarray(raw), np.asarray(masked))
                raw = values.filled(np.nan).tolist()
                scales[f"G_scale_{parity.label}"] = scale
            columns_by_parity[parity] = raw

        roots: dict[Parity, list[float]] = {}
        if energies.size > 1:
            for parity in parities:
                found = gfun.scan_roots(float(shifted[0]), float(shifted[-1]), parity, len(energies))
                roots[parity] = [E - shift for E in found]

        extra = {f"roots_{p.label}": " ".join(format_number(E) for E in roots.get(p, [])) for p in parities}
        columns = ["E"] + [f"G_{p.label}" for p in parities] + ["masked"]
        table = Table(cfg.header(self.name, E_range=cfg.options["E_range"], normalize=cfg.options["normalize"], **scales, **extra), columns)
        for i, E in enumerate(energies.tolist()):
            table.add(E, *(columns_by_parity[p][i] for p in parities), bool(masked[i]))

        if any(masked):
            log.info("%s grid point(s) fall inside baseline pole windows", sum(masked))
        return table
