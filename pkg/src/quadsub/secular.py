"""Secular functions of the boundary multiplier / norm substitution.

For the ball-constrained quadratic the boundary multipliers solve

    phi(lam) = sum_i c_i^2 / (alpha_i + lam)^2 - 1 = 0,

and for the norm-regularized problem the substitution t = ||x||^(p-2) turns
the critical-point system into

    h(t) = sum_i c_i^2 / (sigma t + alpha_i)^2 - t^(2/(p-2)) = 0,

whose zeros coincide (for t > 0, c != 0) with those of the log form

    p(t) = log(sum_i c_i^2 / (sigma t + alpha_i)^2) - (2/(p-2)) log t.

phi and p are strictly convex between consecutive live poles, so each
pole-delimited interval carries at most two roots; this module isolates them
with a minimizer-first safeguarded Newton/bisection scheme and handles the
unbounded end intervals by geometric bracket expansion.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvexityAssumptionError,
    DivergenceError,
    DomainError,
    InvalidInputError,
    NumericalFailureError,
    PoleEvaluationError,
)

logger = logging.getLogger(__name__)

POLE_ABS_TOL = 1e-14
CLUSTER_REL_TOL = 1e-9
DEFAULT_ROOT_TOL = 1e-12
MAX_BISECT = 200
MAX_NEWTON = 50
TANGENCY_FACTOR = 10.0
EXPANSION_LIMIT = 2.0**60
# weights at or below this (relative) size are de-facto zero: their poles are
# unresolvable in double precision and are treated as absent
_LIVE_WEIGHT_FLOOR_REL = 1e-13

_EPS = float(np.finfo(np.float64).eps)


@dataclass(frozen=True)
class SecularSpec:
    """Spectral data defining one secular function family.

    ``alphas`` are the ascending eigenvalues, ``csq`` the squared rotated
    linear-term components.  ``sigma`` and ``p_exponent`` are both present
    (norm-regularized mode) or both absent (ball mode).
    """

    alphas: np.ndarray
    csq: np.ndarray
    sigma: float | None = None
    p_exponent: float | None = None

    def __post_init__(self):
        alphas = np.array(self.alphas, dtype=float)
        csq = np.array(self.csq, dtype=float)
        if alphas.ndim != 1 or csq.ndim != 1 or alphas.size != csq.size:
            raise InvalidInputError("alphas and csq must be 1-d of equal length")
        if alphas.size == 0:
            raise InvalidInputError("empty spectrum")
        if not (np.all(np.isfinite(alphas)) and np.all(np.isfinite(csq))):
            raise InvalidInputError("non-finite spectral data")
        if np.any(np.diff(alphas) < 0):
            raise InvalidInputError("alphas must be ascending")
        if np.any(csq < 0):
            raise InvalidInputError("csq entries must be nonnegative")
        if (self.sigma is None) != (self.p_exponent is None):
            raise InvalidInputError("sigma and p_exponent must be given together")
        if self.sigma is not None:
            if not self.sigma > 0:
                raise InvalidInputError("sigma must be positive")
            if not self.p_exponent > 2:
                raise InvalidInputError("p_exponent must exceed 2")
        alphas.setflags(write=False)
        csq.setflags(write=False)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "csq", csq)

    @property
    def regularized(self) -> bool:
        return self.sigma is not None


@dataclass(frozen=True)
class PoleCluster:
    """A group of nearly equal eigenvalues with their summed weight."""

    value: float
    weight: float
    indices: tuple[int, ...]
    live: bool


@dataclass(frozen=True)
class IntervalRoots:
    """Roots found on one open interval, with the derivative sign at each."""

    interval: tuple[float, float]
    roots: tuple[float, ...]
    derivative_signs: tuple[int, ...]


def cluster_eigenvalues(alphas: np.ndarray, csq: np.ndarray) -> list[PoleCluster]:
    """Merge eigenvalues closer than ``1e-9 * (1 + max|alpha|)``, summing weights."""
    gap = CLUSTER_REL_TOL * (1.0 + float(np.max(np.abs(alphas))))
    floor = (_LIVE_WEIGHT_FLOOR_REL * (1.0 + math.sqrt(float(np.max(csq, initial=0.0))))) ** 2
    clusters: list[PoleCluster] = []
    start = 0
    n = alphas.size
    for i in range(1, n + 1):
        if i == n or alphas[i] - alphas[i - 1] > gap:
            members = tuple(range(start, i))
            weight = float(np.sum(csq[start:i]))
            clusters.append(PoleCluster(
                value=float(np.mean(alphas[start:i])),
                weight=weight,
                indices=members,
                live=weight > floor,
            ))
            start = i
    return clusters


def phi_eval(spec: SecularSpec, lam: float) -> tuple[float, float, float]:
    """Evaluate phi, phi', phi'' at ``lam`` (ball mode only)."""
    if spec.regularized:
        raise InvalidInputError("phi_eval requires a ball-mode spec")
    d = spec.alphas + lam
    live = spec.csq > 0
    if np.any(live & (np.abs(d) <= POLE_ABS_TOL)):
        raise PoleEvaluationError(f"phi evaluated at a live pole (lam={lam})")
    dl = d[live]
    cl = spec.csq[live]
    r2 = cl / (dl * dl)
    value = float(np.sum(r2)) - 1.0
    d1 = -2.0 * float(np.sum(r2 / dl))
    d2 = 6.0 * float(np.sum(r2 / (dl * dl)))
    return value, d1, d2


def h_eval(spec: SecularSpec, t: float) -> tuple[float, float]:
    """Evaluate h and h' at ``t > 0`` (regularized mode only)."""
    if not spec.regularized:
        raise InvalidInputError("h_eval requires a regularized-mode spec")
    if t <= 0.0:
        raise DomainError(f"h is defined for t > 0, got {t}")
    d = spec.sigma * t + spec.alphas
    live = spec.csq > 0
    if np.any(live & (np.abs(d) <= POLE_ABS_TOL)):
        raise PoleEvaluationError(f"h evaluated at a live pole (t={t})")
    dl = d[live]
    cl = spec.csq[live]
    r2 = cl / (dl * dl)
    expo = 2.0 / (spec.p_exponent - 2.0)
    power = math.exp(expo * math.log(t))
    value = float(np.sum(r2)) - power
    d1 = -2.0 * spec.sigma * float(np.sum(r2 / dl)) - (expo / t) * power
    return value, d1


def p_eval(spec: SecularSpec, t: float) -> tuple[float, float]:
    """Evaluate the log form p and p' at ``t > 0`` (regularized mode only)."""
    if not spec.regularized:
        raise InvalidInputError("p_eval requires a regularized-mode spec")
    if t <= 0.0:
        raise DomainError(f"p is defined for t > 0, got {t}")
    d = spec.sigma * t + spec.alphas
    live = spec.csq > 0
    if np.any(live & (np.abs(d) <= POLE_ABS_TOL)):
        raise PoleEvaluationError(f"p evaluated at a live pole (t={t})")
    dl = d[live]
    cl = spec.csq[live]
    r2 = cl / (dl * dl)
    s = float(np.sum(r2))
    if s <= 0.0:
        raise DomainError("nonpositive log argument: all weights vanish")
    expo = 2.0 / (spec.p_exponent - 2.0)
    value = math.log(s) - expo * math.log(t)
    d1 = -2.0 * spec.sigma * float(np.sum(r2 / dl)) / s - expo / t
    return value, d1


_FUNS = {
    "phi": lambda spec, x: phi_eval(spec, x)[:2],
    "h": h_eval,
    "p": p_eval,
}


class _ConvexityMonitor:
    """Records (x, f') pairs and flags derivative-monotonicity violations."""

    def __init__(self, fun: str):
        self.fun = fun
        self.samples: list[tuple[float, float]] = []

    def add(self, x: float, deriv: float) -> None:
        self.samples.append((x, deriv))

    def check(self) -> None:
        pts = sorted(self.samples)
        for (x1, g1), (x2, g2) in zip(pts, pts[1:]):
            if x2 > x1 and g2 < g1 - 1e-9 * (1.0 + abs(g1) + abs(g2)):
                raise ConvexityAssumptionError(
                    f"{self.fun}' decreased from {g1} at {x1} to {g2} at {x2}")


def _arg_tol(tol: float, x: float) -> float:
    return max(tol, 4.0 * _EPS * (1.0 + abs(x)))


def _safeguarded_root(f, lo: float, hi: float, flo: float, fhi: float,
                      tol: float, monitor: _ConvexityMonitor | None = None) -> float:
    """Find the root in a sign-change bracket by bisection + Newton polish."""
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    assert flo * fhi < 0.0
    # orient so that f(xl) < 0 < f(xh)
    if flo < 0.0:
        xl, xh = lo, hi
    else:
        xl, xh = hi, lo
    x = 0.5 * (lo + hi)
    dx_old = abs(hi - lo)
    dx = dx_old
    v, g = f(x)
    if monitor is not None:
        monitor.add(x, g)
    for _ in range(MAX_BISECT):
        newton_ok = (g != 0.0
                     and ((x - xh) * g - v) * ((x - xl) * g - v) < 0.0
                     and abs(2.0 * v) <= abs(dx_old * g))
        if newton_ok:
            dx_old = dx
            dx = v / g
            x_new = x - dx
        else:
            dx_old = dx
            dx = 0.5 * (xh - xl)
            x_new = xl + dx
        if abs(dx) <= _arg_tol(tol, x_new):
            x = x_new
            break
        x = x_new
        v, g = f(x)
        if monitor is not None:
            monitor.add(x, g)
        if v == 0.0:
            return x
        if v < 0.0:
            xl = x
        else:
            xh = x
    # Newton polish drives |f| to its rounding floor, which the downstream
    # feasibility/complementarity residuals rely on
    v, g = f(x)
    best_x, best_v = x, abs(v)
    for _ in range(MAX_NEWTON):
        if g == 0.0 or v == 0.0:
            break
        step = v / g
        x_try = x - step
        if not (min(xl, xh) <= x_try <= max(xl, xh)):
            break
        v_try, g_try = f(x_try)
        if abs(v_try) >= best_v:
            break
        x, v, g = x_try, v_try, g_try
        best_x, best_v = x, abs(v)
        if abs(step) <= _arg_tol(tol, x) * 1e-3:
            break
    return best_x


def _probe_offsets(width: float, tol: float) -> list[float]:
    offs = []
    frac = 0.25
    floor = max(tol, 64.0 * _EPS)
    while frac * width > floor * (1.0 + width):
        offs.append(frac * width)
        frac *= 0.1
    offs.append(max(floor * (1.0 + width), 1e-300))
    return offs


def _bracket_toward_pole(f, pole: float, inner: float, want_positive: bool = True):
    """Walk from ``inner`` toward ``pole`` until f has the wanted sign."""
    for k in range(1, 54):
        x = pole + (inner - pole) * 2.0 ** (-k)
        if x == pole or x == inner:
            break
        try:
            v, g = f(x)
        except PoleEvaluationError:
            break
        if (v > 0.0) == want_positive:
            return x, v, g
    return None


def convex_roots_on_interval(fun: str, spec: SecularSpec,
                             interval: tuple[float, float],
                             tol: float = DEFAULT_ROOT_TOL) -> IntervalRoots:
    """All roots of a strictly convex secular function on one open interval.

    ``fun`` is ``"phi"`` or ``"p"``.  Bounded intervals must be delimited by
    live poles (or, for the log form, by 0), where the function blows up to
    +inf; the method locates the interior minimizer first and then brackets at
    most one root on each side.  Unbounded intervals are only supported for
    phi, which is globally convex wherever defined.
    """
    if fun not in ("phi", "p"):
        raise InvalidInputError(f"unsupported function {fun!r} for convex root isolation")
    raw = _FUNS[fun]
    f = lambda x: raw(spec, x)  # noqa: E731
    a, b = interval
    if not a < b:
        raise InvalidInputError(f"empty interval {interval}")
    monitor = _ConvexityMonitor(fun)

    if math.isinf(b) and not math.isinf(a):
        if fun == "p":
            raise InvalidInputError("unbounded interval root isolation must use h, not p")
        root, sign = _expand_right(f, a, tol, monitor)
        monitor.check()
        return IntervalRoots(interval, (root,), (sign,))
    if math.isinf(a) and not math.isinf(b):
        if fun == "p":
            raise InvalidInputError("unbounded interval root isolation must use h, not p")
        root, sign = _expand_left(f, b, tol, monitor)
        monitor.check()
        return IntervalRoots(interval, (root,), (sign,))
    if math.isinf(a) or math.isinf(b):
        raise InvalidInputError("doubly unbounded interval is not supported")

    width = b - a
    lo_probe = None
    hi_probe = None
    samples: list[tuple[float, float, float]] = []
    for off in _probe_offsets(width, tol):
        x = a + off
        if x <= a or x >= b:
            continue
        try:
            v, g = f(x)
        except PoleEvaluationError:
            continue
        monitor.add(x, g)
        samples.append((x, v, g))
        if g < 0.0:
            lo_probe = (x, v, g)
            break
    for off in _probe_offsets(width, tol):
        x = b - off
        if x <= a or x >= b:
            continue
        try:
            v, g = f(x)
        except PoleEvaluationError:
            continue
        monitor.add(x, g)
        samples.append((x, v, g))
        if g > 0.0:
            hi_probe = (x, v, g)
            break
    if lo_probe is None or hi_probe is None or lo_probe[0] >= hi_probe[0]:
        # no interior sign change of the derivative found at probe resolution:
        # the minimizer hugs one pole; any root there is beyond double
        # precision, so report the interval as rootless
        monitor.check()
        return IntervalRoots(interval, (), ())

    # bisect f' to the interior minimizer
    xl, gl = lo_probe[0], lo_probe[2]
    xh, gh = hi_probe[0], hi_probe[2]
    fmin_x, fmin_v = min(samples, key=lambda s: s[1])[:2]
    while xh - xl > _arg_tol(tol, xl):
        xm = 0.5 * (xl + xh)
        if xm <= xl or xm >= xh:
            break
        v, g = f(xm)
        monitor.add(xm, g)
        if v < fmin_v:
            fmin_x, fmin_v = xm, v
        if g < 0.0:
            xl = xm
        elif g > 0.0:
            xh = xm
        else:
            xl = xh = xm
            break
    m = 0.5 * (xl + xh)
    try:
        vm, gm = f(m)
        monitor.add(m, gm)
        if vm < fmin_v:
            fmin_x, fmin_v = m, vm
    except PoleEvaluationError:
        vm, gm = fmin_v, 0.0
        m = fmin_x

    if fmin_v > 0.0:
        monitor.check()
        return IntervalRoots(interval, (), ())
    if fmin_v >= -TANGENCY_FACTOR * tol:
        monitor.check()
        _, gback = f(fmin_x)
        return IntervalRoots(interval, (fmin_x,), (_sign(gback),))

    roots = []
    left_anchor = next(((x, v) for (x, v, _) in sorted(samples) if x < fmin_x and v > 0.0), None)
    if left_anchor is None:
        left_anchor = _bracket_toward_pole(f, a, fmin_x)
        left_anchor = (left_anchor[0], left_anchor[1]) if left_anchor else None
    if left_anchor is not None:
        roots.append(_safeguarded_root(f, left_anchor[0], fmin_x,
                                       left_anchor[1], fmin_v, tol, monitor))
    else:
        logger.warning("root adjacent to pole at %g is unresolvable; dropped", a)
    right_anchor = next(((x, v) for (x, v, _) in sorted(samples, reverse=True)
                         if x > fmin_x and v > 0.0), None)
    if right_anchor is None:
        right_anchor = _bracket_toward_pole(f, b, fmin_x)
        right_anchor = (right_anchor[0], right_anchor[1]) if right_anchor else None
    if right_anchor is not None:
        roots.append(_safeguarded_root(f, fmin_x, right_anchor[0],
                                       fmin_v, right_anchor[1], tol, monitor))
    else:
        logger.warning("root adjacent to pole at %g is unresolvable; dropped", b)
    monitor.check()
    signs = tuple(_sign(f(r)[1]) for r in sorted(roots))
    return IntervalRoots(interval, tuple(sorted(roots)), signs)


def _sign(x: float) -> int:
    if x > 0.0:
        return 1
    if x < 0.0:
        return -1
    return 0


def _expand_right(f, left: float, tol: float, monitor=None) -> tuple[float, int]:
    scale = 1.0 + abs(left)
    # positive anchor just right of `left`
    delta = 0.25 * scale
    anchor = None
    while delta > 16.0 * _EPS * scale:
        x = left + delta
        try:
            v, g = f(x)
        except PoleEvaluationError:
            delta *= 0.5
            continue
        if monitor is not None:
            monitor.add(x, g)
        if v > 0.0:
            anchor = (x, v)
            break
        delta *= 0.5
    if anchor is None:
        raise DivergenceError(f"no positive value found immediately right of {left}")
    # geometric expansion until the sign flips
    step = max(scale, anchor[0] - left)
    x = anchor[0]
    while True:
        x_next = x + step
        if x_next - left > EXPANSION_LIMIT * scale:
            raise DivergenceError(
                f"no sign change within {EXPANSION_LIMIT:.3g}*(1+|left|) right of {left}")
        v, g = f(x_next)
        if monitor is not None:
            monitor.add(x_next, g)
        if v < 0.0:
            root = _safeguarded_root(f, anchor[0], x_next, anchor[1], v, tol, monitor)
            return root, _sign(f(root)[1])
        if v == 0.0:
            return x_next, _sign(g)
        anchor = (x_next, v)
        x = x_next
        step *= 2.0


def _expand_left(f, right: float, tol: float, monitor=None) -> tuple[float, int]:
    scale = 1.0 + abs(right)
    delta = 0.25 * scale
    anchor = None
    while delta > 16.0 * _EPS * scale:
        x = right - delta
        try:
            v, g = f(x)
        except PoleEvaluationError:
            delta *= 0.5
            continue
        if monitor is not None:
            monitor.add(x, g)
        if v > 0.0:
            anchor = (x, v)
            break
        delta *= 0.5
    if anchor is None:
        raise DivergenceError(f"no positive value found immediately left of {right}")
    step = max(scale, right - anchor[0])
    x = anchor[0]
    while True:
        x_next = x - step
        if right - x_next > EXPANSION_LIMIT * scale:
            raise DivergenceError(
                f"no sign change within {EXPANSION_LIMIT:.3g}*(1+|right|) left of {right}")
        v, g = f(x_next)
        if monitor is not None:
            monitor.add(x_next, g)
        if v < 0.0:
            root = _safeguarded_root(f, x_next, anchor[0], v, anchor[1], tol, monitor)
            return root, _sign(f(root)[1])
        if v == 0.0:
            return x_next, _sign(g)
        anchor = (x_next, v)
        x = x_next
        step *= 2.0


def bracket_unbounded_root(fun: str, spec: SecularSpec, left: float,
                           tol: float = DEFAULT_ROOT_TOL) -> float:
    """The unique root right of ``left`` of a function decaying below zero.

    Requires f(left+) > 0 (live pole or known-positive limit) and f eventually
    negative as the argument grows; expands a bracket geometrically and raises
    ``DivergenceError`` if no sign change appears within 2^60 * (1 + |left|).
    """
    if fun not in _FUNS:
        raise InvalidInputError(f"unknown secular function {fun!r}")
    raw = _FUNS[fun]
    root, _ = _expand_right(lambda x: raw(spec, x), left, tol)
    return root
