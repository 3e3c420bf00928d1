"""Norm-regularized subproblem: critical-point enumeration and classification.

The problem is  min g(x) = 1/2 x'Qx + c'x + (sigma/p) ||x||^p  with sigma > 0
and p > 2; g is coercive, so the global minimum is always attained.  Critical
points satisfy (Q + sigma ||x||^(p-2) I) x = -c.  Writing t = ||x||^(p-2),
the multiplier values with -sigma*t not an eigenvalue of Q are the positive
zeros of the secular function h; zeros on bounded pole intervals are isolated
through the log form (convex there), the unbounded right interval directly
through h, which is strictly decreasing beyond the last pole.

A critical point is a global minimizer iff sigma*t + alpha_1 >= 0, and the
unique local-nonglobal minimizer, when it exists, is the h root on
(max(-alpha_2/sigma, 0), -alpha_1/sigma) with positive h slope.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from . import secular
from .errors import InternalContradictionError, InvalidInputError
from .trs import (
    CheckResult,
    Classification,
    SpectralForm,
    spectral_of,
)

logger = logging.getLogger(__name__)

CLASSIFY_MARGIN = 1e-9
DERIV_STRICT_TOL = 1e-10
DEDUP_TOL = 1e-8
CONTINUUM_TOL = 1e-8
DEFAULT_TOL = 1e-12


@dataclass(frozen=True)
class PrsInstance:
    """Problem data: symmetric Q, linear term c, weight sigma, exponent p."""

    q: np.ndarray
    c: np.ndarray
    sigma: float
    p_exponent: float

    def __post_init__(self):
        # reuse the ball-problem validation for Q/c by round-tripping a view
        from .trs import TrsInstance
        base = TrsInstance(q=self.q, c=self.c)
        if not (np.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidInputError("sigma must be positive")
        if not (np.isfinite(self.p_exponent) and self.p_exponent > 2):
            raise InvalidInputError("p_exponent must exceed 2")
        object.__setattr__(self, "q", base.q)
        object.__setattr__(self, "c", base.c)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def objective(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        nrm = float(np.linalg.norm(x))
        return float(0.5 * x @ self.q @ x + self.c @ x
                     + (self.sigma / self.p_exponent) * nrm**self.p_exponent)

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        nrm = float(np.linalg.norm(x))
        shift = self.sigma * nrm ** (self.p_exponent - 2.0) if nrm > 0 else 0.0
        return self.q @ x + shift * x + self.c


@dataclass(frozen=True)
class PrsCriticalPoint:
    """One critical point; t = ||x||^(p-2)."""

    x: np.ndarray
    t: float
    objective: float
    classification: Classification | None = None
    continuum: bool = False
    source: str = "secular"


def to_spectral(inst: PrsInstance) -> SpectralForm:
    return spectral_of(inst.q, inst.c)


def enumerate_critical(inst: PrsInstance, tol: float = DEFAULT_TOL
                       ) -> list[PrsCriticalPoint]:
    """All critical points, sorted by t ascending.

    Combines the origin (iff c vanishes), boundary-of-substitution points from
    positive secular roots on every pole interval intersected with (0, inf),
    and degenerate-branch representatives at t pinned to -alpha/sigma.
    Points closer than 1e-8 in (x, t) are merged.
    """
    sf = to_spectral(inst)
    alphas, c_rot = sf.alphas, sf.c_rot
    csq = c_rot**2
    sigma = inst.sigma
    expo = 2.0 / (inst.p_exponent - 2.0)
    clusters = secular.cluster_eigenvalues(alphas, csq)
    live = [cl for cl in clusters if cl.live]

    cands: list[tuple[np.ndarray, float, str, bool]] = []

    if float(np.linalg.norm(inst.c)) <= tol:
        cands.append((np.zeros_like(c_rot), 0.0, "origin", False))

    if live:
        spec = secular.SecularSpec(alphas, csq, sigma=sigma, p_exponent=inst.p_exponent)
        poles = sorted(-cl.value / sigma for cl in live)
        positive = [q for q in poles if q > 0.0]
        bounded = list(zip([0.0] + positive, positive))
        for lo, hi in bounded:
            found = secular.convex_roots_on_interval("p", spec, (lo, hi), tol)
            for t in found.roots:
                if t <= 0.0:
                    continue
                y = np.zeros_like(c_rot)
                mask = c_rot != 0.0
                y[mask] = -c_rot[mask] / (sigma * t + alphas[mask])
                cands.append((y, float(t), "secular", False))
        left_edge = positive[-1] if positive else 0.0
        t_right = secular.bracket_unbounded_root("h", spec, left_edge, tol)
        y = np.zeros_like(c_rot)
        mask = c_rot != 0.0
        y[mask] = -c_rot[mask] / (sigma * t_right + alphas[mask])
        cands.append((y, float(t_right), "secular", False))

    for cl in clusters:
        if cl.live:
            continue
        t_k = -cl.value / sigma
        if t_k <= 0.0:
            continue
        y_p = np.zeros_like(c_rot)
        outside = np.ones(len(alphas), dtype=bool)
        outside[list(cl.indices)] = False
        den = sigma * t_k + alphas
        mask = outside & (c_rot != 0.0)
        y_p[mask] = -c_rot[mask] / den[mask]
        radius2 = math.exp(expo * math.log(t_k))
        nrm2 = float(y_p @ y_p)
        if nrm2 > radius2 * (1.0 + CLASSIFY_MARGIN) + CLASSIFY_MARGIN:
            continue
        tau = float(np.sqrt(max(0.0, radius2 - nrm2)))
        if tau > CONTINUUM_TOL:
            for sgn in (1.0, -1.0):
                y = y_p.copy()
                y[cl.indices[0]] += sgn * tau
                cands.append((y, t_k, "eigen_branch", True))
        else:
            cands.append((y_p, t_k, "eigen_branch", False))

    pts: list[PrsCriticalPoint] = []
    for y, t, src, cont in cands:
        x = sf.to_original(y)
        pts.append(PrsCriticalPoint(
            x=x, t=t, objective=inst.objective(x), continuum=cont, source=src))
    pts.sort(key=lambda p: (p.t, p.objective, tuple(p.x)))
    kept: list[PrsCriticalPoint] = []
    for p in pts:
        dup = any(
            abs(p.t - q.t) + float(np.linalg.norm(p.x - q.x)) <= DEDUP_TOL
            for q in kept)
        if not dup:
            kept.append(p)
    return kept


def classify(points: list[PrsCriticalPoint], spectral: SpectralForm,
             inst: PrsInstance, tol: float = CLASSIFY_MARGIN
             ) -> list[PrsCriticalPoint]:
    """Label each critical point; at most one can be local-nonglobal.

    When a local-nonglobal point is emitted, its structural consequences
    (live leading rotated component, alpha_1 < alpha_2, sigma t + alpha_2 > 0)
    are asserted; their failure indicates a numerics bug.
    """
    alphas = spectral.alphas
    sigma = inst.sigma
    a1 = float(alphas[0])
    a2 = float(alphas[1]) if alphas.size >= 2 else None
    margin = tol * (1.0 + float(np.max(np.abs(alphas))))
    spec = secular.SecularSpec(alphas, spectral.c_rot**2,
                               sigma=sigma, p_exponent=inst.p_exponent)
    window_lo = max(-a2 / sigma, 0.0) if a2 is not None else None
    window_hi = -a1 / sigma

    out: list[PrsCriticalPoint] = []
    lng_count = 0
    for p in points:
        if sigma * p.t + a1 >= -margin:
            label = Classification.GLOBAL
        elif (a2 is not None and p.t > margin
              and window_lo + margin < p.t < window_hi - margin):
            _, slope = secular.h_eval(spec, p.t)
            if slope > DERIV_STRICT_TOL:
                label = Classification.LOCAL_NONGLOBAL
                lng_count += 1
                lead = spectral.c_rot[list(_leading_cluster_indices(alphas))]
                if not np.any(lead != 0.0):
                    raise InternalContradictionError(
                        "local-nonglobal point with vanishing leading component")
                if not a1 < a2 - margin:
                    raise InternalContradictionError(
                        "local-nonglobal point despite alpha_1 = alpha_2")
                if not sigma * p.t + a2 > margin:
                    raise InternalContradictionError(
                        "local-nonglobal point violates sigma*t + alpha_2 > 0")
            else:
                if abs(slope) <= DERIV_STRICT_TOL:
                    logger.warning(
                        "borderline zero secular slope %.3e at t=%.17g; "
                        "classified as not a local minimizer", slope, p.t)
                label = Classification.NOT_LOCAL_MIN
        else:
            label = Classification.NOT_LOCAL_MIN
        out.append(replace(p, classification=label))
    if lng_count > 1:
        raise InternalContradictionError(
            f"{lng_count} points passed the local-nonglobal test; theory allows one")
    return out


def _leading_cluster_indices(alphas: np.ndarray):
    gap = secular.CLUSTER_REL_TOL * (1.0 + float(np.max(np.abs(alphas))))
    idx = [0]
    for i in range(1, alphas.size):
        if alphas[i] - alphas[i - 1] > gap:
            break
        idx.append(i)
    return idx


def check_norm_monotonicity(points: list[PrsCriticalPoint],
                            tol: float = 1e-7) -> CheckResult:
    """Objectives must be nonincreasing along increasing norms."""
    for i, p1 in enumerate(points):
        for p2 in points[i + 1:]:
            n1 = float(np.linalg.norm(p1.x))
            n2 = float(np.linalg.norm(p2.x))
            lo, hi = ((p1, n1), (p2, n2)) if n1 <= n2 else ((p2, n2), (p1, n1))
            if hi[1] >= lo[1] + tol and hi[0].objective > lo[0].objective + tol:
                return CheckResult("norm_monotonicity", False, {
                    "norms": [lo[1], hi[1]],
                    "objectives": [lo[0].objective, hi[0].objective]})
    return CheckResult("norm_monotonicity", True)


def check_second_smallest(points: list[PrsCriticalPoint],
                          tol: float = 1e-9) -> CheckResult:
    """The local-nonglobal objective sits strictly between the global
    objective and every other critical objective."""
    classified = [p for p in points if p.classification is not None]
    globals_ = [p for p in classified if p.classification is Classification.GLOBAL]
    lngs = [p for p in classified if p.classification is Classification.LOCAL_NONGLOBAL]
    if not lngs:
        return CheckResult("second_smallest", True)
    lng = lngs[0]
    for p in globals_:
        if not lng.objective > p.objective + tol:
            return CheckResult("second_smallest", False, {
                "reason": "local-nonglobal does not exceed global",
                "lng_objective": lng.objective, "global_objective": p.objective})
    for p in classified:
        if p.classification is Classification.NOT_LOCAL_MIN:
            if not lng.objective < p.objective - tol:
                return CheckResult("second_smallest", False, {
                    "reason": "a non-minimizing point undercuts the local-nonglobal",
                    "lng_objective": lng.objective, "other_objective": p.objective,
                    "other_t": p.t})
    return CheckResult("second_smallest", True)


def solve(inst: PrsInstance, tol: float = DEFAULT_TOL
          ) -> tuple[PrsCriticalPoint, PrsCriticalPoint | None]:
    """Global minimizer plus the local-nonglobal minimizer when one exists.

    All points passing the global test share one norm; a spread beyond 1e-9
    would contradict the optimality characterization and raises.
    """
    sf = to_spectral(inst)
    points = classify(enumerate_critical(inst, tol), sf, inst)
    if not points:
        raise InternalContradictionError("no critical points enumerated; the "
                                         "objective is coercive so one exists")
    best = min(points, key=lambda p: p.objective)
    if best.classification is not Classification.GLOBAL:
        raise InternalContradictionError(
            "minimum-objective point failed the global optimality test")
    globals_ = [p for p in points if p.classification is Classification.GLOBAL]
    norms = [float(np.linalg.norm(p.x)) for p in globals_]
    if max(norms) - min(norms) > 1e-9 * (1.0 + max(norms)):
        raise InternalContradictionError(
            f"global minimizers disagree in norm by {max(norms) - min(norms):.3e}")
    lngs = [p for p in points if p.classification is Classification.LOCAL_NONGLOBAL]
    return best, (lngs[0] if lngs else None)
