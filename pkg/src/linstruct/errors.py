"""Exception hierarchy.

Two families: :class:`DomainError` for mathematically meaningful refusals
(a radius past the threshold, a shift inside the spectrum) and
:class:`InputError` for malformed data.  The CLI maps them to exit codes 1
and 2 respectively.
"""

from __future__ import annotations


class LinstructError(Exception):
    """Base class for every error raised by this package."""

    def details(self) -> dict:
        return {}


class DomainError(LinstructError):
    pass


class InputError(LinstructError, ValueError):
    pass


class DimensionMismatch(InputError):
    pass


class SchemaError(InputError):
    def __init__(self, message: str, location: str | None = None):
        super().__init__(message if location is None else f"{location}: {message}")
        self.location = location

    def details(self) -> dict:
        return {"location": self.location}


class AsymmetricOperator(SchemaError):
    pass


class ZeroZ(SchemaError):
    pass


class ZeroPhi(InputError):
    pass


class ConvergenceError(DomainError):
    pass


class IterationCapExceeded(ConvergenceError):
    pass


class LambdaTooSmall(DomainError):
    def __init__(self, lam: float, op_norm: float):
        super().__init__(f"lambda={lam!r} must exceed the operator norm {op_norm!r}")
        self.lam = lam
        self.op_norm = op_norm

    def details(self) -> dict:
        return {"lambda": self.lam, "op_norm": self.op_norm}


class MuAtEigenvalue(DomainError):
    pass


class NonPositiveRadius(DomainError):
    pass


class OutOfRange(DomainError):
    def __init__(self, message: str, theta: float | None = None):
        super().__init__(message)
        self.theta = theta

    def details(self) -> dict:
        return {} if self.theta is None else {"theta": self.theta}


class MuOutOfRange(OutOfRange):
    pass


class TooFewSamples(DomainError):
    pass
