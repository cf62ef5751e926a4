"""Exceptions raised by the star-product kernel.

All of them derive from ``StarReductionError`` (itself a ``ValueError``) so the
CLI can catch kernel failures in one place and map them to exit code 2.
"""

from __future__ import annotations

from typing import Any, Optional


class StarReductionError(ValueError):
    """Base class for rejected inputs and refuted preconditions."""


class DimensionMismatchError(StarReductionError):
    """Two operands live on different C^{n+1}."""


class IndexOutOfRangeError(StarReductionError):
    """A coordinate index exceeds n."""


class SeriesNormalizationError(StarReductionError):
    """A D-series (or any series to be inverted) does not start with 1."""


class NotInvariantError(StarReductionError):
    """An operation restricted to U(1)-invariant functions got something else."""


class NotHomogeneousError(StarReductionError):
    """An operation restricted to homogeneous functions got something else."""


class NotInIdealError(StarReductionError):
    """Ideal membership refuted: the reduced function does not vanish."""

    def __init__(self, message: str, witness: Optional[Any] = None):
        super().__init__(message)
        self.witness = witness


class TruncationOrderError(StarReductionError):
    """The requested truncation order is too small to decide the question."""


class PreconditionError(StarReductionError):
    """Any other violated precondition."""


class ExprSyntaxError(StarReductionError):
    """Malformed expression text; ``position`` is a 0-based character offset."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position
