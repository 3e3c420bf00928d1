"""Independent oracles for the test suite.

Everything here is deliberately brute force and separate from the package
implementation: direct formula evaluation, dense sign scans with bisection
refinement, and grid/sample searches.  Tests freeze values produced by these
oracles (see the inline notes) or recompute them at run time.
"""

from __future__ import annotations

import numpy as np


def phi_direct(alphas, csq, lam):
    alphas = np.asarray(alphas, dtype=float)
    csq = np.asarray(csq, dtype=float)
    live = csq > 0
    lam = np.asarray(lam, dtype=float)
    terms = csq[live] / (alphas[live] + lam[..., None]) ** 2
    out = terms.sum(axis=-1) - 1.0
    return float(out) if out.ndim == 0 else out


def h_direct(alphas, csq, sigma, p, t):
    alphas = np.asarray(alphas, dtype=float)
    csq = np.asarray(csq, dtype=float)
    live = csq > 0
    t = np.asarray(t, dtype=float)
    terms = csq[live] / (sigma * t[..., None] + alphas[live]) ** 2
    out = terms.sum(axis=-1) - t ** (2.0 / (p - 2.0))
    return float(out) if out.ndim == 0 else out


def bisect_root(f, lo, hi, iters=200):
    flo = f(lo)
    assert flo * f(hi) < 0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def scan_roots(f, lo, hi, npts=200_001, vectorized=True):
    """Dense sign scan followed by bisection refinement."""
    xs = np.linspace(lo, hi, npts)
    vals = f(xs) if vectorized else np.array([f(x) for x in xs])
    sgn = np.sign(vals)
    out = []
    for i in np.nonzero(sgn[:-1] * sgn[1:] < 0)[0]:
        out.append(bisect_root(lambda x: float(f(np.asarray(x))), xs[i], xs[i + 1]))
    return out


def trs_objective(q, c, x):
    x = np.asarray(x, dtype=float)
    return float(0.5 * x @ np.asarray(q) @ x + np.asarray(c) @ x)


def prs_objective(q, c, sigma, p, x):
    x = np.asarray(x, dtype=float)
    return trs_objective(q, c, x) + (sigma / p) * float(np.linalg.norm(x)) ** p


def trs_kkt_points_oracle(q, c, lam_hi=100.0):
    """All nonnegative-multiplier stationary pairs by per-interval scanning."""
    q = np.asarray(q, dtype=float)
    c = np.asarray(c, dtype=float)
    alphas, basis = np.linalg.eigh(q)
    c_rot = basis.T @ c
    csq = c_rot**2
    poles = sorted(-a for a, w in zip(alphas, csq) if w > 1e-26)
    out = []
    x_int = None
    if np.min(np.abs(alphas)) > 1e-10:
        x_int = basis @ (-c_rot / alphas)
        if np.linalg.norm(x_int) < 1.0 - 1e-9:
            out.append((0.0, trs_objective(q, c, x_int)))
    edges = [-lam_hi] + poles + [lam_hi]
    for lo, hi in zip(edges, edges[1:]):
        if hi - lo < 1e-12:
            continue
        f = lambda lam: phi_direct(alphas, csq, lam)  # noqa: E731
        for r in scan_roots(f, lo + 1e-7, hi - 1e-7):
            if r >= -1e-12:
                x = basis @ (-c_rot / (alphas + r))
                out.append((r, trs_objective(q, c, x)))
    return sorted(out)


def ball_sample_min(q, c, count, seed):
    rng = np.random.default_rng(seed)
    n = len(c)
    g = rng.normal(size=(count, n))
    g /= np.maximum(np.linalg.norm(g, axis=1, keepdims=True), 1e-300)
    pts = g * (rng.random(count) ** (1.0 / n))[:, None]
    vals = 0.5 * np.einsum("ij,jk,ik->i", pts, np.asarray(q, dtype=float), pts) + pts @ np.asarray(c, dtype=float)
    return float(vals.min())
