"""Exception types shared across the package."""

from __future__ import annotations

__all__ = [
    "MvampError",
    "ConvergenceError",
    "DivergenceError",
    "InfeasibleSnrError",
]


class MvampError(Exception):
    """Base class for errors raised by this package."""


class ConvergenceError(MvampError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, residual: float | None = None,
                 iterations: int | None = None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class DivergenceError(MvampError):
    """An iterate produced non-finite values; carries the step index."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class InfeasibleSnrError(ValueError, MvampError):
    """A requested network snr cannot be realized at the given density.

    Carries ``lambda_max``, the largest feasible value.
    """

    def __init__(self, message: str, lambda_max: float):
        super().__init__(message)
        self.lambda_max = lambda_max
