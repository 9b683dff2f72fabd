"""Exception types raised by riskdist."""

from __future__ import annotations


class RiskDistError(Exception):
    """Base class for all riskdist errors."""


class SpecParseError(RiskDistError, ValueError):
    """A distribution or distortion spec string could not be parsed."""

    def __init__(self, message: str, token: str | None = None):
        super().__init__(message if token is None else f"{message}: {token!r}")
        self.token = token


class NumericalError(RiskDistError, ArithmeticError):
    """A numerical procedure could not produce a finite, trustworthy value."""


class NotFiniteError(NumericalError):
    """The risk measure is not finite for the given distribution and distortion."""


class ConvergenceError(NumericalError):
    """Adaptive quadrature hit its subdivision budget; ``partial`` holds the best estimate."""

    def __init__(self, message: str, partial: float, error_estimate: float):
        super().__init__(f"{message} (partial estimate {partial!r}, error estimate {error_estimate:.3g})")
        self.partial = partial
        self.error_estimate = error_estimate


class LevelOutOfRangeError(NumericalError):
    """Requested level lies outside the range of the aggregate quantile function."""


class ApplicabilityError(RiskDistError):
    """Hypotheses of the counter-monotonic decomposition do not hold.

    ``report`` carries the :class:`~riskdist.decomposition.ApplicabilityReport`.
    """

    def __init__(self, message: str, report):
        super().__init__(message)
        self.report = report
