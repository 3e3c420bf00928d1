"""Exception hierarchy shared by all quadsub modules."""

from __future__ import annotations


class QuadsubError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(QuadsubError):
    """Input violates a documented precondition (shape, symmetry, range)."""


class NumericalFailureError(QuadsubError):
    """An iteration failed to converge within its bounded budget."""

    def __init__(self, message: str, *, matrix_norm: float | None = None,
                 iterations: int | None = None):
        if matrix_norm is not None or iterations is not None:
            message = f"{message} (matrix_norm={matrix_norm}, iterations={iterations})"
        super().__init__(message)
        self.matrix_norm = matrix_norm
        self.iterations = iterations


class SingularSystemError(QuadsubError):
    """Linear solve hit a pivot below the singularity threshold."""


class PoleEvaluationError(QuadsubError):
    """A secular function was evaluated at a live pole."""


class DomainError(QuadsubError):
    """Argument outside the function's domain (t <= 0, nonpositive log)."""


class ConvexityAssumptionError(QuadsubError):
    """Numerical evidence contradicted the convexity the root isolator relies on."""


class DivergenceError(QuadsubError):
    """Geometric bracket expansion exhausted its range without a sign change."""


class InternalContradictionError(QuadsubError):
    """A theoretical invariant failed; indicates a numerics bug, not bad input."""


class UnsupportedExponentError(QuadsubError):
    """Operation only defined for the cubic regularization (p = 3)."""


class GenerationFailureError(QuadsubError):
    """Targeted instance generation exceeded its rejection budget."""

    def __init__(self, message: str, *, rejections: int | None = None):
        if rejections is not None:
            message = f"{message} (rejections={rejections})"
        super().__init__(message)
        self.rejections = rejections


class ParseError(QuadsubError):
    """Instance file violates the schema; carries the offending field."""

    def __init__(self, message: str, *, field: str | None = None):
        if field is not None:
            message = f"{message} (field: {field})"
        super().__init__(message)
        self.field = field
