"""Exception types shared across the package."""

from __future__ import annotations


class VortexError(Exception):
    """Base class for all package errors."""


class InvalidInputError(VortexError, ValueError):
    """An argument violates a documented precondition."""


class PoleError(VortexError, ZeroDivisionError):
    """A holomorphic map was evaluated at a zero of its denominator."""


class UnsupportedInputError(VortexError, ValueError):
    """The input is well formed but outside what the operation supports."""


class NoVacuumError(VortexError, ValueError):
    """The vacuum equations have no admissible (non-negative) solution."""


class SurfaceSingularityError(VortexError, ValueError):
    """1 - lambda |f|^2 vanishes: the map leaves the target surface."""


class DegenerateDataError(VortexError, ValueError):
    """Holomorphic data makes a Toda determinant vanish identically."""


class DivergenceError(VortexError, RuntimeError):
    """The nonlinear solver failed to converge.

    The residual history is attached as ``history``.
    """

    def __init__(self, message: str, history: list[float] | None = None) -> None:
        super().__init__(message)
        self.history = list(history or [])


class ConfigError(VortexError, ValueError):
    """A run configuration could not be parsed or validated."""
