"""A univariate sextic whose critical values break the second-smallest pattern.

The polynomial

    s(x) = x^6/6 - 21 x^5/10 + 57 x^4/8 - x^3/12 - 435 x^2/32 - 297 x/32

has four critical points: an inflection with horizontal tangent at -0.5, the
global minimizer at 1.5, a local maximizer at 4.5 and a local-nonglobal
minimizer at 5.5.  Its local-nonglobal minimum is only the third smallest
critical value, s(1.5) < s(-0.5) < s(5.5) < s(4.5): the ordering structure of
the ball and norm-regularized problems does not survive general sextics.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InternalContradictionError

# degrees 6..1; the x^0 coefficient is zero
COEFFICIENTS = (1.0 / 6.0, -21.0 / 10.0, 57.0 / 8.0, -1.0 / 12.0,
                -435.0 / 32.0, -297.0 / 32.0)
CRITICAL_POINTS = (-0.5, 1.5, 4.5, 5.5)
ROLES = ("inflection", "global_min", "local_max", "local_nonglobal_min")
DERIVATIVE_TOL = 1e-9


def value(x: float) -> float:
    v = 0.0
    for coef in COEFFICIENTS:
        v = (v + coef) * x
    return v


def derivative(x: float) -> float:
    v = 0.0
    degree = 6
    for coef in COEFFICIENTS:
        v = v * x + degree * coef
        degree -= 1
    return v


@dataclass(frozen=True)
class SexticDemo:
    coefficients: tuple[float, ...]
    critical_points: tuple[float, ...]
    values: tuple[float, ...]
    derivatives: tuple[float, ...]
    ordering_holds: bool

    def to_json(self) -> dict:
        return {
            "coefficients": list(self.coefficients),
            "critical_points": [
                {"x": x, "role": role, "value": v, "derivative": d}
                for x, role, v, d in zip(self.critical_points, ROLES,
                                         self.values, self.derivatives)
            ],
            "ordering": "s(1.5) < s(-0.5) < s(5.5) < s(4.5)",
            "ordering_holds": self.ordering_holds,
        }


def run_demo() -> SexticDemo:
    """Verify stationarity and the critical-value ordering; raise on failure."""
    values = tuple(value(x) for x in CRITICAL_POINTS)
    derivs = tuple(derivative(x) for x in CRITICAL_POINTS)
    for x, d in zip(CRITICAL_POINTS, derivs):
        if abs(d) > DERIVATIVE_TOL:
            raise InternalContradictionError(
                f"s'({x}) = {d:.3e} is not a critical point; transcription bug")
    s_m05, s_15, s_45, s_55 = values
    ordering = s_15 < s_m05 < s_55 < s_45
    if not ordering:
        raise InternalContradictionError(
            f"critical-value ordering failed: {values}")
    return SexticDemo(coefficients=COEFFICIENTS, critical_points=CRITICAL_POINTS,
                      values=values, derivatives=derivs, ordering_holds=ordering)
