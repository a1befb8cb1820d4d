from __future__ import annotations

import argparse
import re
from abc import ABC, abstractmethod
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any

import numpy as np

from rabi import __version__
from rabi.config import Settings
from rabi.models import ModelParams, Parity, Realization, as_fraction
from rabi.output import Table
from rabi.utils.errors import ParameterError, RabiError, UsageError


_INT_RANGE = re.compile(r"^\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?$")


@dataclass(frozen=True)
class RunConfig:
    epsilon: float
    omega: float
    g: float
    k: Fraction
    realization: Realization
    settings: Settings
    fmt: str = "csv"
    out: Path | None = None
    options: dict[str, Any] = field(default_factory=dict)

    def params(self, g: float | None = None) -> ModelParams:
        return ModelParams(self.epsilon, self.omega, self.g if g is None else g, self.k, self.realization)

    def header(self, command: str, **extra: Any) -> dict[str, Any]:
        head: dict[str, Any] = {
            "tool": "rabi",
            "version": __version__,
            "command": command,
            "epsilon": self.epsilon,
            "omega": self.omega,
            "g": self.g,
            "k": str(self.k),
            "realization": self.realization.value,
        }
        settings = asdict(self.settings)
        settings.pop("log_level")
        head.update(settings)
        head.update(extra)
        return head


class Command(ABC):
    name: str
    help: str

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None: ...

    def settings_overrides(self, args: argparse.Namespace) -> dict[str, Any]:
        """Settings fields set by this command's own flags."""
        return {}

    @abstractmethod
    async def run(self, cfg: RunConfig) -> Table: ...


def positive_int(raw: str) -> int:
    try:
        value = int(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected an integer, got {raw!r}") from exc
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {raw!r}")
    return value


def positive_float(raw: str) -> float:
    try:
        value = float(raw)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a number, got {raw!r}") from exc
    if not value > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {raw!r}")
    return value


def bargmann_index(raw: str) -> Fraction:
    try:
        return as_fraction(raw)
    except ParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def parse_grid(raw: str, name: str) -> np.ndarray:
    """``a:b:n`` -> n evenly spaced points from a to b inclusive."""
    parts = raw.split(":")
    if len(parts) != 3:
        raise UsageError(f"{name} must look like a:b:n, got {raw!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise UsageError(f"{name} must look like a:b:n, got {raw!r}") from exc
    if n < 1 or (n > 1 and not hi > lo):
        raise UsageError(f"{name} is empty: {raw!r}")
    return np.linspace(lo, hi, n)


def parse_int_range(raw: str, name: str) -> range:
    """``a..b`` (inclusive) or a single integer."""
    match = _INT_RANGE.match(raw)
    if not match:
        raise UsageError(f"{name} must look like a..b, got {raw!r}")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) is not None else lo
    if lo < 1 or hi < lo:
        raise UsageError(f"{name} must satisfy 1 <= a <= b, got {raw!r}")
    return range(lo, hi + 1)


def parse_parity(raw: str) -> tuple[Parity, ...]:
    if raw == "both":
        return (Parity.EVEN, Parity.ODD)
    return (Parity[raw.upper()],)


def first_failure(results: list[Any]) -> RabiError | None:
    for result in results:
        if isinstance(result, RabiError):
            return result
        if isinstance(result, BaseException):
            raise result
    return None
