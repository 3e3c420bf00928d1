"""Generalized-eigenvalue pencils encoding the stationarity systems.

For the ball problem the boundary multipliers with ||x|| = 1 are real
generalized eigenvalues of the 2n x 2n pencil

    M1(lam) = [[-I, Q], [Q, -cc']] - lam [[0, -I], [-I, 0]],

and its determinant factors as (-1)^n det(Q + lam I)^2 (1 - x'x) at any pair
satisfying the stationarity equation.  For the cubic regularization (p = 3)
every critical norm t = ||x|| is a real generalized eigenvalue of the
(2n+2) x (2n+2) pencil M2(t) with the analogous factorization
(-1)^(n+1) sigma^2 det(Q + sigma t I)^2 (t^2 - x'x).

Both B blocks are signed permutation scalings, so the pencils reduce exactly
to ordinary eigenvalue problems for B^-1 A; the largest real generalized
eigenvalue recovers the global multiplier (norm), and the second largest
recovers the local-nonglobal one whenever classification confirms it exists.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg, prs, trs
from .errors import InternalContradictionError, InvalidInputError, UnsupportedExponentError
from .trs import CheckResult

DEFAULT_IMAG_TOL = 1e-8
EIG_CLUSTER_TOL = 1e-8
DEFAULT_MATCH_TOL = 1e-6
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class Pencil:
    """Matrix pair (A, B) representing A - mu B with invertible B."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.array(self.a, dtype=float)
        b = np.array(self.b, dtype=float)
        if a.shape != b.shape or a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidInputError("A and B must be square with equal shapes")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def size(self) -> int:
        return self.a.shape[0]

    def value(self, mu: float) -> np.ndarray:
        return self.a - mu * self.b


def build_m1(inst: trs.TrsInstance) -> Pencil:
    """The 2n x 2n multiplier pencil of the ball problem."""
    n = inst.n
    eye = np.eye(n)
    zero = np.zeros((n, n))
    a = np.block([[-eye, inst.q], [inst.q, -np.outer(inst.c, inst.c)]])
    b = np.block([[zero, -eye], [-eye, zero]])
    return Pencil(a=a, b=b)


def build_m2(inst: prs.PrsInstance) -> Pencil:
    """The (2n+2) x (2n+2) norm pencil of the cubic regularization."""
    if abs(inst.p_exponent - 3.0) > 1e-12:
        raise UnsupportedExponentError(
            f"the norm pencil exists only for p = 3, got p = {inst.p_exponent}")
    n = inst.n
    sigma = inst.sigma
    m = 2 * n + 2
    a = np.zeros((m, m))
    b = np.zeros((m, m))
    a[0, n + 2:] = inst.c
    a[1:n + 1, 1:n + 1] = -sigma * np.eye(n)
    a[1:n + 1, n + 2:] = inst.q
    a[n + 1, n + 1] = -sigma
    a[n + 2:, 0] = inst.c
    a[n + 2:, 1:n + 1] = inst.q
    b[0, n + 1] = -sigma
    b[1:n + 1, n + 2:] = -sigma * np.eye(n)
    b[n + 1, 0] = -sigma
    b[n + 2:, 1:n + 1] = -sigma * np.eye(n)
    return Pencil(a=a, b=b)


def real_generalized_eigenvalues(pencil: Pencil,
                                 imag_tol: float = DEFAULT_IMAG_TOL) -> np.ndarray:
    """Real mu with det(A - mu B) = 0, ascending, via the B^-1 A reduction."""
    reduced = linalg.solve_linear_many(pencil.b, pencil.a)
    return linalg.real_eigenvalues(reduced, imag_tol)


def cluster_values(values: np.ndarray, tol: float = EIG_CLUSTER_TOL) -> list[float]:
    """Distinct representatives of an ascending value list, merged at ``tol``."""
    out: list[float] = []
    for v in np.sort(np.asarray(values, dtype=float)):
        if not out or v - out[-1] > tol * (1.0 + abs(v)):
            out.append(float(v))
    return out


def solve_trs_via_pencil(inst: trs.TrsInstance, tol: float = DEFAULT_TOL
                         ) -> tuple[float, float | None]:
    """Global multiplier (largest real generalized eigenvalue of M1) and the
    local-nonglobal multiplier (second largest) when classification confirms
    a local-nonglobal minimizer exists."""
    eigs = real_generalized_eigenvalues(build_m1(inst))
    if eigs.size == 0:
        raise InternalContradictionError(
            "the multiplier pencil has an empty real spectrum")
    distinct = cluster_values(eigs)
    _, lng = trs.solve(inst, tol)
    if lng is None:
        return distinct[-1], None
    if len(distinct) < 2:
        raise InternalContradictionError(
            "local-nonglobal confirmed but the pencil has a single real eigenvalue")
    return distinct[-1], distinct[-2]


def solve_cubic_via_pencil(inst: prs.PrsInstance, tol: float = DEFAULT_TOL
                           ) -> tuple[float, float | None]:
    """Global norm (largest real generalized eigenvalue of M2) and the
    local-nonglobal norm (second largest) when classification confirms it."""
    eigs = real_generalized_eigenvalues(build_m2(inst))
    if eigs.size == 0:
        raise InternalContradictionError(
            "the norm pencil has an empty real spectrum")
    distinct = cluster_values(eigs)
    _, lng = prs.solve(inst, tol)
    if lng is None:
        return distinct[-1], None
    if len(distinct) < 2:
        raise InternalContradictionError(
            "local-nonglobal confirmed but the pencil has a single real eigenvalue")
    return distinct[-1], distinct[-2]


def _pencil_blocks(pencil: Pencil, which: str) -> tuple[np.ndarray, int, float]:
    """Recover (Q, n, sigma) from an assembled pencil."""
    if which == "m1":
        n = pencil.size // 2
        return pencil.a[n:, :n], n, 1.0
    if which == "m2":
        n = (pencil.size - 2) // 2
        sigma = -float(pencil.a[n + 1, n + 1])
        return pencil.a[n + 2:, 1:n + 1], n, sigma
    raise InvalidInputError(f"unknown pencil kind {which!r}")


def det_identity_check(pencil: Pencil, point, which: str,
                       tol: float = DEFAULT_MATCH_TOL) -> CheckResult:
    """Verify the determinant factorization at one stationary point.

    The comparison is scaled by the natural determinant magnitude
    det(Q + mu I)^2 (1 + x'x): at boundary points both sides are tiny
    differences of that scale, so a bare relative-to-formula test would
    amplify rounding noise into false failures.
    """
    q, n, sigma = _pencil_blocks(pencil, which)
    x = np.asarray(point.x, dtype=float)
    if which == "m1":
        mu = float(point.multiplier)
        dq = linalg.det(q + mu * np.eye(n))
        formula = (-1.0) ** n * dq**2 * (1.0 - float(x @ x))
    else:
        mu = float(point.t)
        dq = linalg.det(q + sigma * mu * np.eye(n))
        formula = (-1.0) ** (n + 1) * sigma**2 * dq**2 * (mu**2 - float(x @ x))
    lhs = linalg.det(pencil.value(mu))
    scale = 1.0 + abs(formula) + dq**2 * (1.0 + float(x @ x)) * (sigma**2 if which == "m2" else 1.0)
    err = abs(lhs - formula)
    passed = err <= tol * scale
    return CheckResult(f"det_identity_{which}", passed, None if passed else {
        "mu": mu, "determinant": lhs, "formula": formula, "scale": scale})


def nonvanishing_at(pencil: Pencil, mu: float, probe_offsets: list[float],
                    threshold: float = 1e-10) -> CheckResult:
    """Check det(A - mu B) != 0 against the local determinant scale.

    The scale is taken from |det| at nearby probe points, which tracks the
    polynomial's magnitude around mu without committing to an analytic bound.
    """
    val = abs(linalg.det(pencil.value(mu)))
    scale = 1.0
    for off in probe_offsets:
        scale = max(scale, abs(linalg.det(pencil.value(mu + off))))
    passed = val > threshold * scale
    return CheckResult("pencil_nonvanishing", passed, None if passed else {
        "mu": mu, "determinant": val, "scale": scale})
