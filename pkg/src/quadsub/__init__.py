"""Stationary-point enumeration, classification and cross-validation for
ball-constrained and norm-regularized quadratic minimization."""

from .errors import (
    ConvexityAssumptionError,
    DivergenceError,
    DomainError,
    GenerationFailureError,
    InternalContradictionError,
    InvalidInputError,
    NumericalFailureError,
    ParseError,
    PoleEvaluationError,
    QuadsubError,
    SingularSystemError,
    UnsupportedExponentError,
)
from .pencil import (
    Pencil,
    build_m1,
    build_m2,
    det_identity_check,
    real_generalized_eigenvalues,
    solve_cubic_via_pencil,
    solve_trs_via_pencil,
)
from .prs import PrsCriticalPoint, PrsInstance
from .prs import enumerate_critical
from .prs import solve as solve_prs
from .secular import (
    IntervalRoots,
    SecularSpec,
    bracket_unbounded_root,
    convex_roots_on_interval,
    h_eval,
    p_eval,
    phi_eval,
)
from .trs import (
    CheckResult,
    Classification,
    SpectralForm,
    TrsInstance,
    TrsKktPoint,
    enumerate_kkt,
    to_spectral,
)
from .trs import solve as solve_trs

__version__ = "0.1.0"

__all__ = [
    "CheckResult",
    "Classification",
    "ConvexityAssumptionError",
    "DivergenceError",
    "DomainError",
    "GenerationFailureError",
    "IntervalRoots",
    "InternalContradictionError",
    "InvalidInputError",
    "NumericalFailureError",
    "ParseError",
    "Pencil",
    "PoleEvaluationError",
    "PrsCriticalPoint",
    "PrsInstance",
    "QuadsubError",
    "SecularSpec",
    "SingularSystemError",
    "SpectralForm",
    "TrsInstance",
    "TrsKktPoint",
    "UnsupportedExponentError",
    "bracket_unbounded_root",
    "build_m1",
    "build_m2",
    "convex_roots_on_interval",
    "det_identity_check",
    "enumerate_critical",
    "enumerate_kkt",
    "h_eval",
    "p_eval",
    "phi_eval",
    "real_generalized_eigenvalues",
    "solve_cubic_via_pencil",
    "solve_prs",
    "solve_trs",
    "solve_trs_via_pencil",
    "to_spectral",
]
