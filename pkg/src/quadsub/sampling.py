"""Sampling oracles: claimed optima must beat random feasible candidates.

These checks are deliberately independent of the secular and pencil paths:
the global candidate is pitted against uniform feasible samples, and the
local-nonglobal candidate against small feasible perturbations of itself.
"""

from __future__ import annotations

import numpy as np

from .prs import PrsCriticalPoint, PrsInstance
from .trs import CheckResult, TrsInstance, TrsKktPoint

GLOBAL_SLACK = 1e-9
LOCAL_SLACK = 1e-12
PERTURBATION_RADIUS = 1e-4


def ball_samples(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform samples of the closed unit ball."""
    g = rng.normal(size=(count, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    radii = rng.random(count) ** (1.0 / n)
    return g / norms * radii[:, None]


def sphere_samples(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.normal(size=(count, n))
    norms = np.linalg.norm(g, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return g / norms


def _quad_values(q: np.ndarray, c: np.ndarray, pts: np.ndarray) -> np.ndarray:
    return 0.5 * np.einsum("ij,jk,ik->i", pts, q, pts) + pts @ c


def trs_global_oracle(inst: TrsInstance, candidate: TrsKktPoint,
                      samples: int, rng: np.random.Generator) -> CheckResult:
    pts = ball_samples(inst.n, samples, rng)
    vals = _quad_values(inst.q, inst.c, pts)
    best = int(np.argmin(vals))
    passed = candidate.objective <= float(vals[best]) + GLOBAL_SLACK
    return CheckResult("sampling_global", passed, None if passed else {
        "candidate_objective": candidate.objective,
        "better_value": float(vals[best]),
        "better_point": [float(v) for v in pts[best]]})


def trs_local_oracle(inst: TrsInstance, candidate: TrsKktPoint,
                     perturbations: int, rng: np.random.Generator) -> CheckResult:
    """Local minimality probe: feasible perturbations never improve."""
    deltas = PERTURBATION_RADIUS * sphere_samples(inst.n, perturbations, rng)
    pts = candidate.x[None, :] + deltas
    norms = np.linalg.norm(pts, axis=1, keepdims=True)
    # projecting onto the ball is nonexpansive, so |x' - x| stays small
    pts = pts / np.maximum(norms, 1.0)
    vals = _quad_values(inst.q, inst.c, pts)
    best = int(np.argmin(vals))
    passed = candidate.objective <= float(vals[best]) + LOCAL_SLACK
    return CheckResult("sampling_local", passed, None if passed else {
        "candidate_objective": candidate.objective,
        "better_value": float(vals[best]),
        "better_point": [float(v) for v in pts[best]]})


def prs_global_oracle(inst: PrsInstance, candidate: PrsCriticalPoint,
                      samples: int, rng: np.random.Generator) -> CheckResult:
    half_width = 10.0 * (float(np.linalg.norm(candidate.x)) + 1.0)
    pts = rng.uniform(-half_width, half_width, size=(samples, inst.n))
    vals = _quad_values(inst.q, inst.c, pts) + (
        inst.sigma / inst.p_exponent) * np.linalg.norm(pts, axis=1) ** inst.p_exponent
    best = int(np.argmin(vals))
    passed = candidate.objective <= float(vals[best]) + GLOBAL_SLACK
    return CheckResult("sampling_global", passed, None if passed else {
        "candidate_objective": candidate.objective,
        "better_value": float(vals[best]),
        "better_point": [float(v) for v in pts[best]]})


def prs_local_oracle(inst: PrsInstance, candidate: PrsCriticalPoint,
                     perturbations: int, rng: np.random.Generator) -> CheckResult:
    deltas = PERTURBATION_RADIUS * sphere_samples(inst.n, perturbations, rng)
    pts = candidate.x[None, :] + deltas
    vals = _quad_values(inst.q, inst.c, pts) + (
        inst.sigma / inst.p_exponent) * np.linalg.norm(pts, axis=1) ** inst.p_exponent
    best = int(np.argmin(vals))
    passed = candidate.objective <= float(vals[best]) + LOCAL_SLACK
    return CheckResult("sampling_local", passed, None if passed else {
        "candidate_objective": candidate.objective,
        "better_value": float(vals[best]),
        "better_point": [float(v) for v in pts[best]]})


def coercivity_probe(inst: PrsInstance, candidate: PrsCriticalPoint,
                     count: int, rng: np.random.Generator) -> CheckResult:
    """Far samples (norm 10 (||x*|| + 1)) must exceed the global objective."""
    radius = 10.0 * (float(np.linalg.norm(candidate.x)) + 1.0)
    pts = radius * sphere_samples(inst.n, count, rng)
    vals = _quad_values(inst.q, inst.c, pts) + (
        inst.sigma / inst.p_exponent) * np.linalg.norm(pts, axis=1) ** inst.p_exponent
    worst = int(np.argmin(vals))
    passed = bool(vals[worst] > candidate.objective)
    return CheckResult("coercivity", passed, None if passed else {
        "far_value": float(vals[worst]), "global_objective": candidate.objective})
