from __future__ import annotations

import argparse
import logging

from rabi.commands.base import Command, RunConfig, positive_int
from rabi.models import Parity
from rabi.output import Table
from rabi.services.algebra import derive, map_realization
from rabi.services.gfunction import spectrum
from rabi.services.recurrence import fit_decay_rate, minimal_solution, run_recurrence
from rabi.utils.errors import DomainError, UsageError

log = logging.getLogger(__name__)

SELECTORS = {"lowest-even": Parity.EVEN, "lowest-odd": Parity.ODD}


def parse_window(raw: str) -> tuple[int, int]:
    try:
        lo, hi = (int(part) for part in raw.split(":"))
    except ValueError as exc:
        raise UsageError(f"--fit must look like a:b, got {raw!r}") from exc
    if lo < 0 or hi <= lo:
        raise UsageError(f"--fit window is empty: {raw!r}")
    return lo, hi


class CoefficientsCommand(Command):
    name = "coeffs"
    help = "Expansion coefficients d_m, c_m at an energy and their decay rate"

    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        target = parser.add_mutually_exclusive_group(required=True)
        target.add_argument("--E", dest="E", type=float, default=None, help="Energy (model frame)")
        target.add_argument("--select", choices=tuple(SELECTORS), default=None, help="Use the lowest level of a parity")
        parser.add_argument("--m-max", dest="m_max", type=positive_int, default=60)
        parser.add_argument("--fit", default="20:60", help="Decay-fit window a:b")
        parser.add_argument("--recurrence", choices=("auto", "forward", "minimal"), default="auto")
        parser.add_argument(
            "--log-correction",
            dest="log_correction",
            action=argparse.BooleanOptionalAction,
            default=True,
            help="Fit a - gamma m + p ln m + q/m instead of the plain least-squares line a - gamma m",
        )

    async def run(self, cfg: RunConfig) -> Table:
        options = cfg.options
        m_lo, m_hi = parse_window(options["fit"])
        m_max = options["m_max"]
        if m_hi > m_max:
            raise UsageError(f"--fit upper end {m_hi} exceeds --m-max {m_max}")

        params = cfg.params()
        unified, shift = map_realization(params)
        dq = derive(unified)

        if options["select"] is not None:
            parity = SELECTORS[options["select"]]
            levels = spectrum(params, settings=cfg.settings, method="groot").energies(parity)
            if not levels:
                raise DomainError(f"no {parity.label} level found in the default window")
            E = levels[0]
            log.info("selected %s eigenvalue E=%r", options["select"], E)
        else:
            E = options["E"]

        method = options["recurrence"]
        if method == "auto":
            method = "minimal" if options["select"] is not None else "forward"
        if method == "minimal":
            seq = minimal_solution(E + shift, unified, m_max, cfg.settings.pole_guard)
        else:
            seq = run_recurrence(E + shift, unified, m_max, cfg.settings.pole_guard)

        corrected = options["log_correction"] and m_lo >= 1
        gamma = fit_decay_rate(seq, m_lo, m_hi, log_correction=corrected)
        reference = dq.gamma_d
        log.info("fitted decay rate %.6g, reference ln(omega/2g) = %.6g", gamma, reference)

        header = cfg.header(
            self.name,
            E=E,
            recurrence=method,
            fit=options["fit"],
            log_correction=options["log_correction"],
            fit_model="a - gamma m + p ln m + q/m" if corrected else "a - gamma m",
            gamma_fit=gamma,
            gamma_reference=reference,
            truncated=seq.truncated,
        )
        table = Table(header, ["m", "d", "c", "ln_abs_d"])
        d, c, ln_d = seq.d_values(), seq.c_values(), seq.ln_abs_d()
        for m in range(seq.m_max + 1):
            table.add(m, float(d[m]), float(c[m]), float(ln_d[m]))
        return table
