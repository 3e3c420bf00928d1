"""Full solve-and-check reports for one instance.

A report enumerates and classifies every stationary point, runs the complete
check battery (residuals, ordering properties, determinant identities, and
the pencil cross-path), and serializes to stable JSON.  For ball instances
with a non-unit radius the core unit solution is rescaled back: x by radius,
multipliers by radius^-2; per-point residuals refer to the unit-ball core,
which is where the numerical guarantees live.
"""

from __future__ import annotations

import time

import numpy as np

from . import pencil, prs, trs
from .errors import InternalContradictionError
from .instances import ParsedInstance, instance_to_dict
from .prs import PrsCriticalPoint, PrsInstance
from .trs import CheckResult, Classification, TrsInstance, TrsKktPoint

STATIONARITY_RTOL = 1e-8
FEASIBILITY_TOL = 1e-10
COMPLEMENTARITY_TOL = 1e-10
MULTIPLIER_SLACK = 1e-12
T_CONSISTENCY_TOL = 1e-8
CROSS_PATH_TOL = 1e-6
DET_IDENTITY_TOL = 1e-6
MONOTONICITY_TOL = 1e-7
EQUAL_NORM_TOL = 1e-8
ORDER_MARGIN = 1e-9
STRICT_COMPL_TOL = 1e-10


def trs_residuals(inst: TrsInstance, point: TrsKktPoint) -> dict:
    x = point.x
    lam = point.multiplier
    nrm2 = float(x @ x)
    return {
        "stationarity": float(np.linalg.norm(inst.q @ x + lam * x + inst.c)),
        "feasibility": max(0.0, nrm2 - 1.0),
        "complementarity": abs(lam * (nrm2 - 1.0)),
        "multiplier_negativity": max(0.0, -lam),
    }


def prs_residuals(inst: PrsInstance, point: PrsCriticalPoint) -> dict:
    nrm = float(np.linalg.norm(point.x))
    power = nrm ** (inst.p_exponent - 2.0) if nrm > 0 else 0.0
    return {
        "stationarity": float(np.linalg.norm(inst.gradient(point.x))),
        "t_consistency": abs(point.t - power),
    }


def check_trs_residuals(inst: TrsInstance, points: list[TrsKktPoint]) -> CheckResult:
    bound = STATIONARITY_RTOL * (1.0 + float(np.linalg.norm(inst.c)))
    for p in points:
        r = trs_residuals(inst, p)
        if (r["stationarity"] > bound or r["feasibility"] > FEASIBILITY_TOL
                or r["complementarity"] > COMPLEMENTARITY_TOL
                or r["multiplier_negativity"] > MULTIPLIER_SLACK):
            return CheckResult("kkt_residuals", False,
                               {"multiplier": p.multiplier, **r})
    return CheckResult("kkt_residuals", True)


def check_prs_residuals(inst: PrsInstance, points: list[PrsCriticalPoint]) -> CheckResult:
    bound = STATIONARITY_RTOL * (1.0 + float(np.linalg.norm(inst.c)))
    for p in points:
        r = prs_residuals(inst, p)
        if r["stationarity"] > bound or r["t_consistency"] > T_CONSISTENCY_TOL:
            return CheckResult("critical_residuals", False, {"t": p.t, **r})
    return CheckResult("critical_residuals", True)


def check_strict_complementarity(points: list[TrsKktPoint]) -> CheckResult:
    for p in points:
        if p.classification is Classification.LOCAL_NONGLOBAL:
            nrm = float(np.linalg.norm(p.x))
            if p.multiplier <= 0.0 or abs(nrm - 1.0) > STRICT_COMPL_TOL:
                return CheckResult("strict_complementarity", False, {
                    "multiplier": p.multiplier, "norm": nrm})
    return CheckResult("strict_complementarity", True)


def check_global_dominance(points: list[TrsKktPoint]) -> CheckResult:
    globals_ = [p for p in points if p.classification is Classification.GLOBAL]
    others = [p for p in points if p.classification is not Classification.GLOBAL]
    for g in globals_:
        for o in others:
            if g.multiplier < o.multiplier - ORDER_MARGIN:
                return CheckResult("global_multiplier_dominance", False, {
                    "global_multiplier": g.multiplier, "other_multiplier": o.multiplier})
    return CheckResult("global_multiplier_dominance", True)


def check_equal_global_norms(points: list[PrsCriticalPoint]) -> CheckResult:
    norms = [float(np.linalg.norm(p.x)) for p in points
             if p.classification is Classification.GLOBAL]
    if norms and max(norms) - min(norms) > 1e-9 * (1.0 + max(norms)):
        return CheckResult("equal_global_norms", False, {"norms": norms})
    return CheckResult("equal_global_norms", True)


def _match(a: float, b: float, tol: float = CROSS_PATH_TOL) -> bool:
    return abs(a - b) <= tol * (1.0 + abs(b)) + tol


def trs_pencil_section(inst: TrsInstance, points: list[TrsKktPoint]
                       ) -> tuple[dict, list[CheckResult]]:
    """Pencil eigenvalues, cross-path agreement and determinant identities."""
    m1 = pencil.build_m1(inst)
    eigs = pencil.real_generalized_eigenvalues(m1)
    distinct = pencil.cluster_values(eigs)
    checks: list[CheckResult] = []

    globals_ = [p for p in points if p.classification is Classification.GLOBAL]
    lngs = [p for p in points if p.classification is Classification.LOCAL_NONGLOBAL]
    section: dict = {"real_generalized_eigenvalues": [float(v) for v in eigs]}
    if not distinct:
        checks.append(CheckResult("pencil_cross_global", False,
                                  {"reason": "empty real spectrum"}))
        return section, checks
    section["multiplier_global"] = distinct[-1]
    if globals_:
        ok = _match(distinct[-1], globals_[0].multiplier)
        checks.append(CheckResult("pencil_cross_global", ok, None if ok else {
            "pencil": distinct[-1], "secular": globals_[0].multiplier}))
    if lngs:
        if len(distinct) >= 2:
            section["multiplier_local_nonglobal"] = distinct[-2]
            ok = _match(distinct[-2], lngs[0].multiplier)
            checks.append(CheckResult("pencil_cross_lng", ok, None if ok else {
                "pencil": distinct[-2], "secular": lngs[0].multiplier}))
        else:
            checks.append(CheckResult("pencil_cross_lng", False,
                                      {"reason": "single real eigenvalue"}))
    else:
        section["multiplier_local_nonglobal"] = None

    for p in points:
        res = pencil.det_identity_check(m1, p, "m1", DET_IDENTITY_TOL)
        if not res.passed:
            checks.append(res)
            break
    else:
        checks.append(CheckResult("det_identity_m1", True))

    if lngs:
        sf = trs.to_spectral(inst)
        a1 = float(sf.alphas[0])
        a2 = float(sf.alphas[1])
        spread = max((a2 - a1) / 2.0, 1e-3)
        checks.append(pencil.nonvanishing_at(m1, -a1, [spread, -spread]))
    return section, checks


def cubic_pencil_section(inst: PrsInstance, points: list[PrsCriticalPoint]
                         ) -> tuple[dict, list[CheckResult]]:
    m2 = pencil.build_m2(inst)
    eigs = pencil.real_generalized_eigenvalues(m2)
    distinct = pencil.cluster_values(eigs)
    checks: list[CheckResult] = []

    globals_ = [p for p in points if p.classification is Classification.GLOBAL]
    lngs = [p for p in points if p.classification is Classification.LOCAL_NONGLOBAL]
    section: dict = {"real_generalized_eigenvalues": [float(v) for v in eigs]}
    if not distinct:
        checks.append(CheckResult("pencil_cross_global", False,
                                  {"reason": "empty real spectrum"}))
        return section, checks
    section["norm_global"] = distinct[-1]
    if globals_:
        target = float(np.linalg.norm(globals_[0].x))
        ok = _match(distinct[-1], target)
        checks.append(CheckResult("pencil_cross_global", ok, None if ok else {
            "pencil": distinct[-1], "secular": target}))
    if lngs:
        if len(distinct) >= 2:
            section["norm_local_nonglobal"] = distinct[-2]
            target = float(np.linalg.norm(lngs[0].x))
            ok = _match(distinct[-2], target)
            checks.append(CheckResult("pencil_cross_lng", ok, None if ok else {
                "pencil": distinct[-2], "secular": target}))
        else:
            checks.append(CheckResult("pencil_cross_lng", False,
                                      {"reason": "single real eigenvalue"}))
    else:
        section["norm_local_nonglobal"] = None

    for p in points:
        res = pencil.det_identity_check(m2, p, "m2", DET_IDENTITY_TOL)
        if not res.passed:
            checks.append(res)
            break
    else:
        checks.append(CheckResult("det_identity_m2", True))

    checks.append(check_m2_trichotomy(inst, eigs))

    if lngs:
        sf = prs.to_spectral(inst)
        a1 = float(sf.alphas[0])
        a2 = float(sf.alphas[1])
        spread = max((a2 - a1) / (2.0 * inst.sigma), 1e-3)
        checks.append(pencil.nonvanishing_at(m2, -a1 / inst.sigma, [spread, -spread]))
    return section, checks


def check_m2_trichotomy(inst: PrsInstance, eigs: np.ndarray,
                        tol: float = CROSS_PATH_TOL) -> CheckResult:
    """Every real eigenvalue of the norm pencil is 0, a pole, or a secular zero.

    The secular test uses the p = 3 algebraic form sum c_i^2/(sigma t +
    alpha_i)^2 - t^2, which extends the positive-domain function to the
    negative eigenvalues the pencil may carry.
    """
    sf = prs.to_spectral(inst)
    alphas, csq = sf.alphas, sf.c_rot**2
    sigma = inst.sigma
    for mu in np.asarray(eigs, dtype=float):
        if abs(mu) <= tol:
            continue
        d = sigma * mu + alphas
        if float(np.min(np.abs(d))) <= tol * (1.0 + abs(mu)) * sigma:
            continue
        live = csq > 0
        h_val = float(np.sum(csq[live] / d[live] ** 2)) - mu * mu
        h_slope = -2.0 * sigma * float(np.sum(csq[live] / d[live] ** 3)) - 2.0 * mu
        if abs(h_val) <= tol * (1.0 + abs(h_slope)):
            continue
        return CheckResult("m2_trichotomy", False, {
            "eigenvalue": float(mu), "secular_value": h_val})
    return CheckResult("m2_trichotomy", True)


def _trs_point_json(inst: TrsInstance, p: TrsKktPoint, radius: float) -> dict:
    return {
        "x": [float(v) * radius for v in p.x],
        "multiplier": p.multiplier / radius**2,
        "objective": p.objective,
        "on_boundary": p.on_boundary,
        "classification": p.classification.value if p.classification else None,
        "continuum": p.continuum,
        "residuals": trs_residuals(inst, p),
    }


def _prs_point_json(inst: PrsInstance, p: PrsCriticalPoint) -> dict:
    return {
        "x": [float(v) for v in p.x],
        "t": p.t,
        "objective": p.objective,
        "classification": p.classification.value if p.classification else None,
        "continuum": p.continuum,
        "residuals": prs_residuals(inst, p),
    }


def build_report(parsed: ParsedInstance, tol: float = 1e-12,
                 with_pencil: bool = True, with_timings: bool = False) -> dict:
    """Solve, classify, run every check, and assemble the JSON report."""
    t0 = time.perf_counter()
    checks: list[CheckResult] = []
    timings: dict = {"enabled": with_timings}

    if parsed.problem == "trs":
        inst: TrsInstance = parsed.instance
        sf = trs.to_spectral(inst)
        t1 = time.perf_counter()
        try:
            points = trs.classify(trs.enumerate_kkt(inst, tol), sf)
            consistent: CheckResult | None = None
        except InternalContradictionError as exc:
            points = []
            consistent = CheckResult("internal_consistency", False, {"error": str(exc)})
        t2 = time.perf_counter()
        if consistent is not None:
            checks.append(consistent)
        else:
            checks.append(check_trs_residuals(inst, points))
            checks.append(trs.check_multiplier_monotonicity(points, MONOTONICITY_TOL))
            checks.append(trs.check_equal_norm_identity(points, EQUAL_NORM_TOL))
            checks.append(trs.check_second_smallest(points, ORDER_MARGIN))
            checks.append(check_strict_complementarity(points))
            checks.append(check_global_dominance(points))
        pencil_section: dict | None = None
        if with_pencil and points:
            sec, pchecks = trs_pencil_section(inst, points)
            pencil_section = sec
            checks.extend(pchecks)
        t3 = time.perf_counter()
        point_dicts = [_trs_point_json(inst, p, parsed.radius) for p in points]
        spectral = {"alphas": [float(v) / parsed.radius**2 for v in sf.alphas],
                    "c_rot": [float(v) / parsed.radius for v in sf.c_rot]}
    else:
        inst = parsed.instance
        sf = prs.to_spectral(inst)
        t1 = time.perf_counter()
        try:
            points = prs.classify(prs.enumerate_critical(inst, tol), sf, inst)
            consistent = None
        except InternalContradictionError as exc:
            points = []
            consistent = CheckResult("internal_consistency", False, {"error": str(exc)})
        t2 = time.perf_counter()
        if consistent is not None:
            checks.append(consistent)
        else:
            checks.append(check_prs_residuals(inst, points))
            checks.append(prs.check_norm_monotonicity(points, MONOTONICITY_TOL))
            checks.append(prs.check_second_smallest(points, ORDER_MARGIN))
            checks.append(check_equal_global_norms(points))
        pencil_section = None
        if with_pencil and points and abs(inst.p_exponent - 3.0) <= 1e-12:
            sec, pchecks = cubic_pencil_section(inst, points)
            pencil_section = sec
            checks.extend(pchecks)
        t3 = time.perf_counter()
        point_dicts = [_prs_point_json(inst, p) for p in points]
        spectral = {"alphas": [float(v) for v in sf.alphas],
                    "c_rot": [float(v) for v in sf.c_rot]}

    if with_timings:
        timings.update({
            "enumerate_classify_s": t2 - t1,
            "pencil_and_checks_s": t3 - t2,
            "total_s": time.perf_counter() - t0,
        })

    return {
        "schema": "quadsub-report-v1",
        "instance": instance_to_dict(parsed),
        "spectral": spectral,
        "points": point_dicts,
        "pencil": pencil_section,
        "checks": [c.to_json() for c in checks],
        "all_checks_passed": all(c.passed for c in checks),
        "timings": timings,
    }
