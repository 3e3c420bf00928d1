"""Randomized property suite: every ordering theorem as a machine check.

One *trial* draws an instance, enumerates and classifies its stationary
points, and runs the full battery: residuals, multiplier/norm monotonicity,
the second-smallest ordering, equal-norm identities, determinant identities,
pencil cross-path agreement, and (sampled) optimality oracles.  Targeted
trials rejection-sample instances with a confirmed local-nonglobal minimizer
so the ordering checks are exercised non-vacuously.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import generate, prs, report, sampling, trs
from .errors import GenerationFailureError, QuadsubError
from .instances import dump_json
from .prs import PrsInstance
from .trs import CheckResult, TrsInstance

P_GRID = (2.5, 3.0, 4.0)
SIGMA_GRID = (0.5, 1.0, 2.0)
BASIS_INVARIANCE_STRIDE = 10
DEFAULT_ORACLE_SAMPLES = 10_000
ORACLE_PERTURBATIONS = 1_000
TARGETED_FRACTION = 20  # one targeted trial per 20 random ones


def _random_orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(n, n)))
    return q * np.sign(np.diag(r))


def check_basis_invariance(inst, rng: np.random.Generator,
                           tol: float = 1e-8) -> CheckResult:
    """Enumeration must be invariant (as (multiplier, objective) multisets)
    under orthogonal conjugation of the instance."""
    v = _random_orthogonal(inst.n, rng)
    if isinstance(inst, TrsInstance):
        rotated = TrsInstance(q=v @ inst.q @ v.T, c=v @ inst.c)
        base = [(p.multiplier, p.objective) for p in trs.enumerate_kkt(inst)]
        conj = [(p.multiplier, p.objective) for p in trs.enumerate_kkt(rotated)]
    else:
        rotated = PrsInstance(q=v @ inst.q @ v.T, c=v @ inst.c,
                              sigma=inst.sigma, p_exponent=inst.p_exponent)
        base = [(p.t, p.objective) for p in prs.enumerate_critical(inst)]
        conj = [(p.t, p.objective) for p in prs.enumerate_critical(rotated)]
    base.sort()
    conj.sort()
    if len(base) != len(conj):
        return CheckResult("basis_invariance", False, {
            "count": len(base), "rotated_count": len(conj)})
    for (m1, f1), (m2, f2) in zip(base, conj):
        if abs(m1 - m2) > tol * (1.0 + abs(m1)) or abs(f1 - f2) > tol * (1.0 + abs(f1)):
            return CheckResult("basis_invariance", False, {
                "pair": [m1, f1], "rotated_pair": [m2, f2]})
    return CheckResult("basis_invariance", True)


def trs_battery(inst: TrsInstance, rng: np.random.Generator,
                oracle_samples: int = 0,
                basis_invariance: bool = False,
                fault: str | None = None) -> list[CheckResult]:
    """All per-instance checks for one ball-problem instance."""
    checks: list[CheckResult] = []
    sf = trs.to_spectral(inst)
    try:
        points = trs.classify(trs.enumerate_kkt(inst), sf)
    except QuadsubError as exc:
        return [CheckResult("internal_consistency", False, {"error": str(exc)})]
    if fault == "flip_first_objective" and points:
        points = [replace(points[0], objective=-points[0].objective)] + points[1:]

    checks.append(report.check_trs_residuals(inst, points))
    checks.append(trs.check_multiplier_monotonicity(points, report.MONOTONICITY_TOL))
    checks.append(trs.check_equal_norm_identity(points, report.EQUAL_NORM_TOL))
    checks.append(trs.check_second_smallest(points, report.ORDER_MARGIN))
    checks.append(report.check_strict_complementarity(points))
    checks.append(report.check_global_dominance(points))
    _, pencil_checks = report.trs_pencil_section(inst, points)
    checks.extend(pencil_checks)
    if basis_invariance:
        checks.append(check_basis_invariance(inst, rng))
    if oracle_samples > 0 and points:
        best = min(points, key=lambda p: p.objective)
        checks.append(sampling.trs_global_oracle(inst, best, oracle_samples, rng))
        lngs = [p for p in points
                if p.classification is trs.Classification.LOCAL_NONGLOBAL]
        if lngs:
            checks.append(sampling.trs_local_oracle(
                inst, lngs[0], ORACLE_PERTURBATIONS, rng))
    return checks


def prs_battery(inst: PrsInstance, rng: np.random.Generator,
                oracle_samples: int = 0,
                basis_invariance: bool = False,
                fault: str | None = None) -> list[CheckResult]:
    """All per-instance checks for one regularized-problem instance."""
    checks: list[CheckResult] = []
    sf = prs.to_spectral(inst)
    try:
        points = prs.classify(prs.enumerate_critical(inst), sf, inst)
    except QuadsubError as exc:
        return [CheckResult("internal_consistency", False, {"error": str(exc)})]
    if fault == "flip_first_objective" and points:
        points = [replace(points[0], objective=-points[0].objective)] + points[1:]

    checks.append(report.check_prs_residuals(inst, points))
    checks.append(prs.check_norm_monotonicity(points, report.MONOTONICITY_TOL))
    checks.append(prs.check_second_smallest(points, report.ORDER_MARGIN))
    checks.append(report.check_equal_global_norms(points))
    if abs(inst.p_exponent - 3.0) <= 1e-12:
        _, pencil_checks = report.cubic_pencil_section(inst, points)
        checks.extend(pencil_checks)
    if basis_invariance:
        checks.append(check_basis_invariance(inst, rng))
    best = min(points, key=lambda p: p.objective) if points else None
    if best is not None:
        checks.append(sampling.coercivity_probe(inst, best, 100, rng))
    if oracle_samples > 0 and best is not None:
        checks.append(sampling.prs_global_oracle(inst, best, oracle_samples, rng))
        lngs = [p for p in points
                if p.classification is prs.Classification.LOCAL_NONGLOBAL]
        if lngs:
            checks.append(sampling.prs_local_oracle(
                inst, lngs[0], ORACLE_PERTURBATIONS, rng))
    return checks


@dataclass(frozen=True)
class TrialSpec:
    problem: str
    kind: str  # "random" | "targeted" | "fault"
    index: int
    seed: int
    nmax: int
    oracle_samples: int
    p_exponent: float = 3.0
    sigma: float = 1.0


def _run_trial(spec: TrialSpec) -> dict:
    stream = {"random": 0, "targeted": 1, "fault": 2}[spec.kind]
    problem_code = 0 if spec.problem == "trs" else 1
    rng = np.random.default_rng([spec.seed, problem_code, stream, spec.index])
    fault = None
    rejections = 0
    if spec.kind == "fault":
        # closed-form instance; flipping the interior objective breaks exactly
        # the multiplier-monotonicity check
        inst = TrsInstance(q=[[-1.0]], c=[-0.75])
        fault = "flip_first_objective"
    elif spec.kind == "targeted":
        n = int(rng.integers(2, max(spec.nmax, 2) + 1))
        try:
            inst, rejections = generate.targeted_lng_instance(
                spec.problem, n, rng, sigma=spec.sigma, p=spec.p_exponent)
        except GenerationFailureError as exc:
            return {"index": spec.index, "kind": spec.kind, "problem": spec.problem,
                    "checks": [CheckResult("targeted_generation", False,
                                           {"error": str(exc)}).to_json()],
                    "instance": None, "rejections": exc.rejections}
    else:
        n = int(rng.integers(1, spec.nmax + 1))
        inst = generate.random_instance(spec.problem, n, rng,
                                        sigma=spec.sigma, p=spec.p_exponent)
    basis_inv = spec.kind != "fault" and spec.index % BASIS_INVARIANCE_STRIDE == 0
    if isinstance(inst, TrsInstance):
        checks = trs_battery(inst, rng, oracle_samples=spec.oracle_samples,
                             basis_invariance=basis_inv, fault=fault)
    else:
        checks = prs_battery(inst, rng, oracle_samples=spec.oracle_samples,
                             basis_invariance=basis_inv, fault=fault)
    from .generate import as_parsed
    from .instances import instance_to_dict
    return {"index": spec.index, "kind": spec.kind, "problem": spec.problem,
            "checks": [c.to_json() for c in checks],
            "instance": instance_to_dict(as_parsed(inst)),
            "rejections": rejections}


def run_verify(trials: int, nmax: int, seed: int,
               problems: tuple[str, ...] = ("trs", "prs"),
               oracle_samples: int = DEFAULT_ORACLE_SAMPLES,
               fail_dir: str | None = None,
               fault: bool = False,
               jobs: int = 1) -> dict:
    """Run the property suite and summarize pass/fail counts per check."""
    if trials < 1:
        raise QuadsubError("trials must be >= 1")
    specs: list[TrialSpec] = []
    targeted = max(1, math.ceil(trials / TARGETED_FRACTION))
    for problem in problems:
        for i in range(trials):
            p = P_GRID[i % len(P_GRID)] if problem == "prs" else 3.0
            sg = SIGMA_GRID[i % len(SIGMA_GRID)] if problem == "prs" else 1.0
            specs.append(TrialSpec(problem, "random", i, seed, nmax,
                                   oracle_samples, p_exponent=p, sigma=sg))
        if nmax >= 2:
            for i in range(targeted):
                # targeted cubic instances keep the pencil cross-path covered
                specs.append(TrialSpec(problem, "targeted", i, seed, nmax,
                                       oracle_samples, p_exponent=3.0, sigma=1.0))
    if fault:
        specs.append(TrialSpec("trs", "fault", 0, seed, 1, 0))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_trial, specs, chunksize=8))
    else:
        results = [_run_trial(s) for s in specs]
    results.sort(key=lambda r: (r["problem"], r["kind"], r["index"]))

    counts: dict[str, dict[str, int]] = {}
    failures: list[dict] = []
    targeted_counts = {p: 0 for p in problems}
    for res in results:
        if res["kind"] == "targeted" and res["instance"] is not None:
            targeted_counts[res["problem"]] += 1
        for chk in res["checks"]:
            entry = counts.setdefault(chk["name"], {"pass": 0, "fail": 0})
            if chk["passed"]:
                entry["pass"] += 1
            else:
                entry["fail"] += 1
                failures.append({"trial": {"problem": res["problem"],
                                           "kind": res["kind"],
                                           "index": res["index"]},
                                 "check": chk,
                                 "instance": res["instance"]})
    if fail_dir and failures:
        os.makedirs(fail_dir, exist_ok=True)
        for i, failure in enumerate(failures):
            path = os.path.join(fail_dir, f"failure_{i:04d}.json")
            with open(path, "w", encoding="utf-8") as fh:
                fh.write(dump_json(failure))
                fh.write("\n")
    return {
        "trials": trials,
        "problems": list(problems),
        "targeted_instances": targeted_counts,
        "checks": {name: counts[name] for name in sorted(counts)},
        "failure_count": len(failures),
        "failures": failures,
        "all_passed": not failures,
    }
