"""Unit-ball trust-region subproblem: KKT enumeration and classification.

The problem is  min 1/2 x'Qx + c'x  subject to  x'x <= 1.  A pair (x, lam)
is a KKT point iff (Q + lam I)x = -c, lam >= 0, ||x||^2 <= 1 and
lam (||x||^2 - 1) = 0.  In the eigenbasis of Q the boundary multipliers with
-lam not an eigenvalue are exactly the nonnegative zeros of the secular
function phi; multipliers pinned at an eigenvalue of -Q (the degenerate
branch) contribute solution families when the matching rotated linear-term
components vanish.

Classification follows the optimality theory: a point is Global iff its
multiplier weakly dominates -alpha_1; the unique local-nonglobal minimizer,
when it exists, is the phi root in (-alpha_2, -alpha_1) with positive phi
slope and positive multiplier; everything else is a stationary point that is
not a local minimizer.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from . import secular
from .errors import InternalContradictionError, InvalidInputError
from .linalg import SymEig, sym_eig

logger = logging.getLogger(__name__)

SYM_REL_TOL = 1e-12
CLASSIFY_MARGIN = 1e-9
DERIV_STRICT_TOL = 1e-10
DEDUP_TOL = 1e-8
BOUNDARY_MERGE_TOL = 1e-9
NONNEG_SLACK = 1e-12
CONTINUUM_TOL = 1e-8
DEFAULT_TOL = 1e-12


class Classification(str, Enum):
    GLOBAL = "global"
    LOCAL_NONGLOBAL = "local_nonglobal"
    NOT_LOCAL_MIN = "not_local_min"


@dataclass(frozen=True)
class TrsInstance:
    """Problem data: symmetric Q and linear term c, unit-ball constraint."""

    q: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        q = np.array(self.q, dtype=float)
        c = np.array(self.c, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise InvalidInputError(f"Q must be square, got shape {q.shape}")
        if q.shape[0] == 0:
            raise InvalidInputError("empty instance (n = 0)")
        if c.ndim != 1 or c.size != q.shape[0]:
            raise InvalidInputError("dimension mismatch between Q and c")
        if not (np.all(np.isfinite(q)) and np.all(np.isfinite(c))):
            raise InvalidInputError("non-finite instance data")
        qnorm = float(np.linalg.norm(q))
        if float(np.linalg.norm(q - q.T)) > SYM_REL_TOL * max(qnorm, 1.0):
            raise InvalidInputError("Q is not symmetric within tolerance")
        q = 0.5 * (q + q.T)
        q.setflags(write=False)
        c.setflags(write=False)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "c", c)

    @property
    def n(self) -> int:
        return self.q.shape[0]

    def objective(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        return float(0.5 * x @ self.q @ x + self.c @ x)


@dataclass(frozen=True)
class SpectralForm:
    """Eigenbasis of Q with the linear term rotated into it."""

    alphas: np.ndarray
    c_rot: np.ndarray
    basis: np.ndarray

    def to_original(self, y: np.ndarray) -> np.ndarray:
        return self.basis @ y


@dataclass(frozen=True)
class TrsKktPoint:
    """One KKT point in original coordinates."""

    x: np.ndarray
    multiplier: float
    objective: float
    on_boundary: bool
    classification: Classification | None = None
    continuum: bool = False
    source: str = "secular"


def spectral_of(q: np.ndarray, c: np.ndarray) -> SpectralForm:
    eig: SymEig = sym_eig(q)
    return SpectralForm(alphas=eig.eigenvalues, c_rot=eig.basis.T @ c, basis=eig.basis)


def to_spectral(inst: TrsInstance) -> SpectralForm:
    """Eigendecompose Q and rotate c into the eigenbasis."""
    return spectral_of(inst.q, inst.c)


def _masked_ratio(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Componentwise -num/den treating exact-zero numerators as zero."""
    out = np.zeros_like(num)
    mask = num != 0.0
    out[mask] = -num[mask] / den[mask]
    return out


def enumerate_kkt(inst: TrsInstance, tol: float = DEFAULT_TOL) -> list[TrsKktPoint]:
    """All KKT points, sorted by multiplier ascending.

    Combines the interior candidate (lam = 0, Q nonsingular, strictly inside
    the ball), the boundary points from nonnegative secular roots on every
    pole-delimited interval, and the degenerate-branch representatives at
    multipliers pinned to eigenvalues of -Q.  Points closer than 1e-8 in
    (x, lam) are merged.
    """
    sf = to_spectral(inst)
    alphas, c_rot = sf.alphas, sf.c_rot
    csq = c_rot**2
    clusters = secular.cluster_eigenvalues(alphas, csq)
    live = [cl for cl in clusters if cl.live]

    # (y, lam, on_boundary, source, continuum)
    cands: list[tuple[np.ndarray, float, bool, str, bool]] = []

    alpha_scale = float(np.max(np.abs(alphas)))
    if float(np.min(np.abs(alphas))) > 1e-12 * max(alpha_scale, 1.0):
        y = -c_rot / alphas
        nrm = float(np.linalg.norm(y))
        if nrm < 1.0 - BOUNDARY_MERGE_TOL:
            cands.append((y, 0.0, False, "interior", False))
        elif nrm <= 1.0 + BOUNDARY_MERGE_TOL:
            cands.append((y, 0.0, True, "interior", False))

    if live:
        spec = secular.SecularSpec(alphas, csq)
        poles = sorted(-cl.value for cl in live)
        edges = [-np.inf] + poles + [np.inf]
        for lo, hi in zip(edges, edges[1:]):
            if hi <= 0.0:
                continue
            found = secular.convex_roots_on_interval("phi", spec, (lo, hi), tol)
            for lam in found.roots:
                if lam < -NONNEG_SLACK:
                    continue
                y = _masked_ratio(c_rot, alphas + lam)
                cands.append((y, float(lam), True, "secular", False))

    for cl in clusters:
        if cl.live:
            continue
        lam = -cl.value
        if lam < -NONNEG_SLACK:
            continue
        y_p = np.zeros_like(c_rot)
        outside = np.ones(len(alphas), dtype=bool)
        outside[list(cl.indices)] = False
        den = alphas + lam
        mask = outside & (c_rot != 0.0)
        y_p[mask] = -c_rot[mask] / den[mask]
        nrm2 = float(y_p @ y_p)
        if nrm2 > 1.0 + BOUNDARY_MERGE_TOL:
            continue
        tau = float(np.sqrt(max(0.0, 1.0 - nrm2)))
        if tau > CONTINUUM_TOL:
            for sgn in (1.0, -1.0):
                y = y_p.copy()
                y[cl.indices[0]] += sgn * tau
                cands.append((y, lam, True, "eigen_branch", True))
        else:
            cands.append((y_p, lam, True, "eigen_branch", False))

    pts: list[TrsKktPoint] = []
    for y, lam, onb, src, cont in cands:
        x = sf.to_original(y)
        pts.append(TrsKktPoint(
            x=x, multiplier=lam, objective=inst.objective(x),
            on_boundary=onb, continuum=cont, source=src))
    pts.sort(key=lambda p: (p.multiplier, not p.on_boundary, p.objective,
                            tuple(p.x)))
    kept: list[TrsKktPoint] = []
    for p in pts:
        dup = any(
            abs(p.multiplier - q.multiplier) + float(np.linalg.norm(p.x - q.x)) <= DEDUP_TOL
            for q in kept)
        if not dup:
            kept.append(p)
    return kept


def classify(points: list[TrsKktPoint], spectral: SpectralForm,
             tol: float = CLASSIFY_MARGIN) -> list[TrsKktPoint]:
    """Label each point Global / LocalNonGlobal / NotLocalMin.

    Raises ``InternalContradictionError`` if two distinct points pass the
    local-nonglobal test; at most one can exist.
    """
    alphas = spectral.alphas
    a1 = float(alphas[0])
    a2 = float(alphas[1]) if alphas.size >= 2 else None
    margin = tol * (1.0 + float(np.max(np.abs(alphas))))
    spec = secular.SecularSpec(alphas, spectral.c_rot**2)

    out: list[TrsKktPoint] = []
    lng_count = 0
    for p in points:
        if p.multiplier >= -a1 - margin:
            label = Classification.GLOBAL
        elif (a2 is not None and p.on_boundary and p.multiplier > margin
              and -a2 + margin < p.multiplier < -a1 - margin):
            # strictly inside the window the point is necessarily a phi root
            _, slope, _ = secular.phi_eval(spec, p.multiplier)
            if slope > DERIV_STRICT_TOL:
                label = Classification.LOCAL_NONGLOBAL
                lng_count += 1
            else:
                if abs(slope) <= DERIV_STRICT_TOL:
                    logger.warning(
                        "borderline zero secular slope %.3e at multiplier %.17g; "
                        "classified as not a local minimizer", slope, p.multiplier)
                label = Classification.NOT_LOCAL_MIN
        else:
            label = Classification.NOT_LOCAL_MIN
        out.append(replace(p, classification=label))
    if lng_count > 1:
        raise InternalContradictionError(
            f"{lng_count} points passed the local-nonglobal test; theory allows one")
    return out


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one machine-checked property."""

    name: str
    passed: bool
    witness: dict | None = None

    def to_json(self) -> dict:
        return {"name": self.name, "passed": bool(self.passed), "witness": self.witness}


def check_multiplier_monotonicity(points: list[TrsKktPoint],
                                  tol: float = 1e-7) -> CheckResult:
    """Objectives must be nonincreasing along increasing multipliers."""
    for i, p1 in enumerate(points):
        for p2 in points[i + 1:]:
            lo, hi = (p1, p2) if p1.multiplier <= p2.multiplier else (p2, p1)
            if hi.multiplier >= lo.multiplier + tol and hi.objective > lo.objective + tol:
                return CheckResult("multiplier_monotonicity", False, {
                    "multipliers": [lo.multiplier, hi.multiplier],
                    "objectives": [lo.objective, hi.objective]})
    return CheckResult("multiplier_monotonicity", True)


def check_equal_norm_identity(points: list[TrsKktPoint],
                              tol: float = 1e-8) -> CheckResult:
    """For equal-norm pairs, f2 - f1 = (lam1 - lam2)/4 * ||x1 - x2||^2."""
    for i, p1 in enumerate(points):
        for p2 in points[i + 1:]:
            n1 = float(np.linalg.norm(p1.x))
            n2 = float(np.linalg.norm(p2.x))
            if abs(n1 - n2) > tol:
                continue
            lhs = p2.objective - p1.objective
            rhs = 0.25 * (p1.multiplier - p2.multiplier) * float(
                np.linalg.norm(p1.x - p2.x) ** 2)
            if abs(lhs - rhs) > tol * (1.0 + abs(p1.objective) + abs(p2.objective)):
                return CheckResult("equal_norm_identity", False, {
                    "multipliers": [p1.multiplier, p2.multiplier],
                    "objective_difference": lhs, "identity_value": rhs})
    return CheckResult("equal_norm_identity", True)


def check_second_smallest(points: list[TrsKktPoint],
                          tol: float = 1e-9) -> CheckResult:
    """The local-nonglobal objective sits strictly between the global
    objective and every other stationary objective; all global points share
    one multiplier and one objective."""
    classified = [p for p in points if p.classification is not None]
    globals_ = [p for p in classified if p.classification is Classification.GLOBAL]
    lngs = [p for p in classified if p.classification is Classification.LOCAL_NONGLOBAL]
    if globals_:
        scale = 1.0 + max(abs(p.multiplier) for p in globals_)
        lam_spread = max(p.multiplier for p in globals_) - min(p.multiplier for p in globals_)
        f_spread = max(p.objective for p in globals_) - min(p.objective for p in globals_)
        if lam_spread > tol * scale or f_spread > tol * (1.0 + max(abs(p.objective) for p in globals_)):
            return CheckResult("second_smallest", False, {
                "reason": "global points disagree",
                "multiplier_spread": lam_spread, "objective_spread": f_spread})
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
                    "other_multiplier": p.multiplier})
    return CheckResult("second_smallest", True)


def solve(inst: TrsInstance, tol: float = DEFAULT_TOL
          ) -> tuple[TrsKktPoint, TrsKktPoint | None]:
    """Global minimizer plus the local-nonglobal minimizer when one exists."""
    sf = to_spectral(inst)
    points = classify(enumerate_kkt(inst, tol), sf)
    if not points:
        raise InternalContradictionError("no KKT points enumerated; the global "
                                         "minimizer always exists")
    best = min(points, key=lambda p: p.objective)
    if best.classification is not Classification.GLOBAL:
        raise InternalContradictionError(
            "minimum-objective point failed the global optimality test")
    lngs = [p for p in points if p.classification is Classification.LOCAL_NONGLOBAL]
    return best, (lngs[0] if lngs else None)
