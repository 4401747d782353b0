"""Exception hierarchy shared by all happymetrics modules."""

from __future__ import annotations


class HappymetricsError(Exception):
    """Base class for every error raised by this package."""


class DataError(HappymetricsError):
    """Bad input data: missing files or columns, domain violations, duplicate years."""


class SpecError(HappymetricsError):
    """Invalid model specification: unknown variables, bad base codes, collinear requests."""


class EstimationError(HappymetricsError):
    """Estimation cannot proceed: rank deficiency, too few observations, degenerate fits."""


class ConvergenceError(EstimationError):
    """Iterative optimizer failed to converge.

    Carries the last-iteration diagnostics instead of fabricated estimates.
    """

    def __init__(self, message: str, *, iterations: int, loglike: float, grad_norm: float):
        super().__init__(message)
        self.iterations = iterations
        self.loglike = loglike
        self.grad_norm = grad_norm


class SeparationError(ConvergenceError):
    """Likelihood is unbounded: parameters diverged (perfect separation)."""
