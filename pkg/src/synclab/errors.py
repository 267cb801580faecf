"""Exception types shared across synclab."""

from typing import Optional


class SyncLabError(Exception):
    """Base class for every error raised by synclab."""


class InputError(SyncLabError, ValueError):
    """A precondition or file format was violated by the caller."""


class NumericalError(SyncLabError, ArithmeticError):
    """An iterative routine failed to converge or produced non-finite values."""

    def __init__(self, message: str, best_estimate: Optional[object] = None,
                 residual: Optional[float] = None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.residual = residual

    def __str__(self) -> str:
        base = super().__str__()
        if self.residual is not None:
            return f"{base} (residual={self.residual:.3e})"
        return base
