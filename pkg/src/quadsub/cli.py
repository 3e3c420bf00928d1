"""Command-line front end.

Subcommands:

    solve        full enumeration + classification + check report
    pencil       eigenvalue-path-only report
    gen          random or targeted instance generation
    verify       randomized property suite
    oracle       sampling-based optimality verification
    demo-sextic  the sextic whose critical values break the ordering pattern

Exit code 0 means every enabled check passed.  ``SOLVER_TOL`` overrides the
default root tolerance, ``SOLVER_JOBS`` the verify worker count.
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import generate, pencil, report, sampling, sextic, verify
from .errors import QuadsubError
from .instances import dump_json, instance_to_dict, parse_instance
from .trs import Classification, TrsInstance

DEFAULT_TOL = 1e-12


def _env_tol() -> float:
    raw = os.environ.get("SOLVER_TOL")
    if raw is None:
        return DEFAULT_TOL
    try:
        value = float(raw)
    except ValueError:
        raise QuadsubError(f"SOLVER_TOL is not a number: {raw!r}")
    if not value > 0:
        raise QuadsubError(f"SOLVER_TOL must be positive: {value}")
    return value


def _env_jobs() -> int:
    raw = os.environ.get("SOLVER_JOBS")
    if raw is None:
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise QuadsubError(f"SOLVER_JOBS is not an integer: {raw!r}")
    return max(1, value)


def _emit(args, payload: dict, human: str | None = None) -> None:
    text = dump_json(payload)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            fh.write("\n")
    if args.json or not human:
        print(text)
    else:
        print(human)


def _summarize_report(rep: dict) -> str:
    lines = [f"problem: {rep['instance']['problem']}  n: {rep['instance']['n']}"]
    key = "multiplier" if rep["instance"]["problem"] == "trs" else "t"
    for p in rep["points"]:
        lines.append(
            f"  {key}={p[key]:+.12g}  objective={p['objective']:+.12g}  "
            f"{p['classification']}{'  (continuum)' if p['continuum'] else ''}")
    for chk in rep["checks"]:
        lines.append(f"  [{'PASS' if chk['passed'] else 'FAIL'}] {chk['name']}")
    lines.append("all checks passed" if rep["all_checks_passed"]
                 else "SOME CHECKS FAILED")
    return "\n".join(lines)


def cmd_solve(args) -> int:
    parsed = parse_instance(args.instance)
    rep = report.build_report(parsed, tol=args.tol, with_pencil=not args.no_pencil,
                              with_timings=args.timings)
    _emit(args, rep, _summarize_report(rep))
    return 0 if rep["all_checks_passed"] else 1


def cmd_pencil(args) -> int:
    parsed = parse_instance(args.instance)
    if parsed.problem == "trs":
        pen = pencil.build_m1(parsed.instance)
        lam_g, lam_l = pencil.solve_trs_via_pencil(parsed.instance, args.tol)
        payload = {
            "problem": "trs",
            "real_generalized_eigenvalues":
                [float(v) for v in pencil.real_generalized_eigenvalues(pen)],
            "multiplier_global": lam_g,
            "multiplier_local_nonglobal": lam_l,
        }
    else:
        pen = pencil.build_m2(parsed.instance)
        t_g, t_l = pencil.solve_cubic_via_pencil(parsed.instance, args.tol)
        payload = {
            "problem": "prs",
            "real_generalized_eigenvalues":
                [float(v) for v in pencil.real_generalized_eigenvalues(pen)],
            "norm_global": t_g,
            "norm_local_nonglobal": t_l,
        }
    payload["instance"] = instance_to_dict(parsed)
    _emit(args, payload)
    return 0


def cmd_gen(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.kind == "random":
        inst = generate.random_instance(args.problem, args.n, rng,
                                        sigma=args.sigma, p=args.p)
        rejections = 0
    else:
        inst, rejections = generate.targeted_lng_instance(
            args.problem, args.n, rng, sigma=args.sigma, p=args.p)
    parsed = generate.as_parsed(inst)
    payload = instance_to_dict(parsed)
    if args.kind == "targeted-lng":
        print(f"targeted generation accepted after {rejections} rejections",
              file=sys.stderr)
    _emit(args, payload)
    return 0


def cmd_verify(args) -> int:
    problems = tuple(args.problems.split(","))
    for p in problems:
        if p not in ("trs", "prs"):
            raise QuadsubError(f"unknown problem {p!r} in --problems")
    summary = verify.run_verify(
        trials=args.trials, nmax=args.nmax, seed=args.seed, problems=problems,
        oracle_samples=args.oracle_samples, fail_dir=args.fail_dir,
        fault=args.self_test_fault, jobs=args.jobs)
    human_lines = [f"trials per problem: {summary['trials']}  "
                   f"targeted: {summary['targeted_instances']}"]
    for name, cnt in summary["checks"].items():
        human_lines.append(f"  {name}: {cnt['pass']} pass / {cnt['fail']} fail")
    human_lines.append("all checks passed" if summary["all_passed"]
                       else f"{summary['failure_count']} failures")
    compact = dict(summary)
    compact["failures"] = compact["failures"][:10]
    _emit(args, compact, "\n".join(human_lines))
    return 0 if summary["all_passed"] else 1


def cmd_oracle(args) -> int:
    parsed = parse_instance(args.instance)
    rng = np.random.default_rng(args.seed)
    if parsed.problem == "trs":
        from . import trs as trs_mod
        inst = parsed.instance
        points = trs_mod.classify(trs_mod.enumerate_kkt(inst, args.tol),
                                  trs_mod.to_spectral(inst))
        best = min(points, key=lambda p: p.objective)
        lngs = [p for p in points
                if p.classification is Classification.LOCAL_NONGLOBAL]
        if args.self_test_fault:
            best = max(points, key=lambda p: p.objective)
        checks = [sampling.trs_global_oracle(inst, best, args.samples, rng)]
        if lngs:
            checks.append(sampling.trs_local_oracle(
                inst, lngs[0], sampling_perturbations(args), rng))
    else:
        from . import prs as prs_mod
        inst = parsed.instance
        points = prs_mod.classify(prs_mod.enumerate_critical(inst, args.tol),
                                  prs_mod.to_spectral(inst), inst)
        best = min(points, key=lambda p: p.objective)
        lngs = [p for p in points
                if p.classification is Classification.LOCAL_NONGLOBAL]
        if args.self_test_fault:
            best = max(points, key=lambda p: p.objective)
        checks = [sampling.prs_global_oracle(inst, best, args.samples, rng)]
        if lngs:
            checks.append(sampling.prs_local_oracle(
                inst, lngs[0], sampling_perturbations(args), rng))
    payload = {
        "instance": instance_to_dict(parsed),
        "samples": args.samples,
        "checks": [c.to_json() for c in checks],
        "all_checks_passed": all(c.passed for c in checks),
    }
    _emit(args, payload)
    return 0 if payload["all_checks_passed"] else 1


def sampling_perturbations(args) -> int:
    return args.perturbations


def cmd_demo_sextic(args) -> int:
    demo = sextic.run_demo()
    payload = demo.to_json()
    human = ["sextic critical points:"]
    for entry in payload["critical_points"]:
        human.append(f"  x={entry['x']:+.2f}  s(x)={entry['value']:+.10f}  "
                     f"s'(x)={entry['derivative']:+.2e}  ({entry['role']})")
    human.append(f"ordering {payload['ordering']}: "
                 f"{'holds' if payload['ordering_holds'] else 'FAILS'}")
    _emit(args, payload, "\n".join(human))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="quadsub",
        description="Stationary-point enumeration and cross-validation for "
                    "ball-constrained and norm-regularized quadratics")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--tol", type=float, default=None,
                       help="root tolerance (default 1e-12 or SOLVER_TOL)")
        p.add_argument("--seed", type=int, default=0, help="RNG seed")
        p.add_argument("--out", type=str, default=None, help="write JSON here")
        p.add_argument("--json", action="store_true",
                       help="print full JSON to stdout")

    p = sub.add_parser("solve", help="solve one instance and run all checks")
    p.add_argument("instance", help="instance file path or inline JSON")
    p.add_argument("--no-pencil", action="store_true",
                   help="skip the eigenvalue cross-path")
    p.add_argument("--timings", action="store_true",
                   help="include wall-clock timings (breaks byte determinism)")
    common(p)
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("pencil", help="eigenvalue-path-only report")
    p.add_argument("instance")
    common(p)
    p.set_defaults(func=cmd_pencil)

    p = sub.add_parser("gen", help="generate an instance file")
    p.add_argument("--kind", choices=("random", "targeted-lng"), default="random")
    p.add_argument("--problem", choices=("trs", "prs"), default="trs")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--p", type=float, default=3.0)
    common(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("verify", help="run the randomized property suite")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--nmax", type=int, default=8)
    p.add_argument("--problems", type=str, default="trs,prs",
                   help="comma-separated subset of trs,prs")
    p.add_argument("--oracle-samples", type=int, default=verify.DEFAULT_ORACLE_SAMPLES)
    p.add_argument("--fail-dir", type=str, default=None,
                   help="directory for failure artifacts")
    p.add_argument("--self-test-fault", action="store_true",
                   help="inject one objective sign flip; the suite must "
                        "report exactly one failing check")
    p.add_argument("--jobs", type=int, default=None,
                   help="parallel trial workers (default SOLVER_JOBS or 1)")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="sampling-based optimality verification")
    p.add_argument("instance")
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--perturbations", type=int, default=1_000)
    p.add_argument("--self-test-fault", action="store_true",
                   help="mislabel the global candidate; the oracle must fail")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("demo-sextic", help="critical-value ordering of the "
                                           "counterexample sextic")
    common(p)
    p.set_defaults(func=cmd_demo_sextic)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "tol", None) is None:
            args.tol = _env_tol()
        if getattr(args, "jobs", None) is None and args.command == "verify":
            args.jobs = _env_jobs()
        return args.func(args)
    except QuadsubError as exc:
        error = {"error": type(exc).__name__, "message": str(exc)}
        print(dump_json(error), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
