"""Semantic exception hierarchy for the toolkit.

Public functions raise these instead of bare ValueError so callers can
distinguish bad inputs from numerical breakdown.
"""


class GNormalError(Exception):
    """Base error for this package."""


class ValidationError(GNormalError, ValueError):
    """Inputs violate a documented contract (domain, shape, finiteness)."""


class EvaluationError(GNormalError, ArithmeticError):
    """A test function produced a non-finite value at an evaluation point."""


class ConsistencyError(GNormalError, FloatingPointError):
    """An internal invariant failed beyond its numerical tolerance."""


class DivergenceError(GNormalError, FloatingPointError):
    """A time-stepping scheme produced a non-finite intermediate value."""


class CoverageError(GNormalError, ValueError):
    """An interpolation grid was too narrow for the requested evaluation."""


class DomainError(GNormalError, ValueError):
    """A parameter scan has no usable points in the requested domain."""
