from __future__ import annotations


class RabiError(Exception):
    """Base class for every error raised by the solver."""


class ParameterError(RabiError, ValueError):
    """Raised when model parameters violate a realization constraint."""


class DomainError(RabiError, ValueError):
    """Raised when a coupling lies outside the self-adjoint window 0 < g < omega/2."""


class PoleError(RabiError, ArithmeticError):
    """Raised when a trial energy sits on a baseline energy."""

    def __init__(self, message: str, m: int, baseline: float) -> None:
        super().__init__(message)
        self.m = m
        self.baseline = baseline


class DegenerateWindowError(RabiError, ValueError):
    """Raised when a decay-rate fit window cannot be used."""


class ConvergenceError(RabiError, RuntimeError):
    """Raised when the dense eigensolver fails."""


class ConfigError(RabiError, RuntimeError):
    pass


class UsageError(RabiError, ValueError):
    pass
