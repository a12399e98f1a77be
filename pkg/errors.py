"""
Exception hierarchy for the geometric quantum mechanics toolkit
Every error raised by the library derives from GeometryError
"""

from typing import Any, Optional


class GeometryError(Exception):
    """Root of all toolkit errors"""


class DimensionError(GeometryError, ValueError):
    """Vector or matrix shapes do not agree"""


class NormalizationError(GeometryError, ValueError):
    """State is not unit norm, or a zero vector was given where a state is needed"""


class SelfAdjointnessError(GeometryError, ValueError):
    """Operator is not Hermitian, or a quantity that must be real is not"""


class BasePointError(GeometryError, ValueError):
    """Tangent vectors live over different base states"""


class DegenerateMetricError(GeometryError, ArithmeticError):
    """Pull-back metric is not invertible"""


class PositivityError(GeometryError, ArithmeticError):
    """A Gram determinant or variance is negative beyond tolerance"""


class NumericalError(GeometryError, RuntimeError):
    """Linear algebra backend failed"""


class ConvergenceError(GeometryError, RuntimeError):
    """Relaxation could not decrease the energy after exhausting step-size backoff"""


class InvariantViolation(GeometryError, AssertionError):
    """A checked identity failed beyond tolerance"""

    def __init__(self, message: str, report: Optional[Any] = None):
        super().__init__(message)
        self.report = report


__all__ = [
    'GeometryError',
    'DimensionError',
    'NormalizationError',
    'SelfAdjointnessError',
    'BasePointError',
    'DegenerateMetricError',
    'PositivityError',
    'NumericalError',
    'ConvergenceError',
    'InvariantViolation',
]
