"""Dense real matrix kernels the solvers stand on.

Self-contained implementations sized for small dense problems (n <= ~70):
cyclic Jacobi for symmetric eigendecompositions, balancing + Hessenberg
reduction + Francis double-shift QR for real eigenvalues of general square
matrices, fraction-free Bareiss / pivoted LU for determinants, and Gaussian
elimination with partial pivoting for linear solves.  numpy supplies array
storage and vector arithmetic only; the test suite cross-checks every kernel
against numpy.linalg as an independent oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NumericalFailureError, SingularSystemError

DEFAULT_SYM_TOL = 1e-12
DEFAULT_IMAG_TOL = 1e-8
DEFAULT_PIVOT_RTOL = 1e-12
JACOBI_MAX_SWEEPS = 64
JACOBI_OFF_RTOL = 1e-12
QR_MAX_ITERS_FACTOR = 40

_EPS = float(np.finfo(np.float64).eps)


def _as_square(matrix, name: str = "matrix") -> np.ndarray:
    a = np.array(matrix, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"{name} must be square, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return a


def _as_vector(vector, name: str = "vector") -> np.ndarray:
    v = np.array(vector, dtype=float)
    if v.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {v.shape}")
    if v.size and not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return v


@dataclass(frozen=True)
class SymEig:
    """Eigendecomposition of a symmetric matrix, eigenvalues ascending."""

    eigenvalues: np.ndarray
    basis: np.ndarray  # orthogonal; columns are eigenvectors


def sym_eig(matrix, tol: float = DEFAULT_SYM_TOL) -> SymEig:
    """Symmetric eigendecomposition by cyclic Jacobi sweeps.

    Sweeps run until the off-diagonal Frobenius norm drops below
    ``1e-12 * ||S||_F`` (at most 64 sweeps).  Raises ``InvalidInputError``
    for non-square or asymmetric input.
    """
    s = _as_square(matrix)
    n = s.shape[0]
    norm = float(np.linalg.norm(s))
    if float(np.linalg.norm(s - s.T)) > tol * (1.0 + norm):
        raise InvalidInputError("matrix is not symmetric within tolerance")
    a = 0.5 * (s + s.T)
    v = np.eye(n)
    if n <= 1:
        return SymEig(np.diag(a).copy(), v)

    target = JACOBI_OFF_RTOL * norm
    for _ in range(JACOBI_MAX_SWEEPS):
        offdiag = a - np.diag(np.diag(a))
        off = float(np.linalg.norm(offdiag))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                # rotation angle annihilating a[p, q]
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                sn = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - sn * rq
                a[q, :] = sn * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - sn * cq
                a[:, q] = sn * cp + c * cq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - sn * vq
                v[:, q] = sn * vp + c * vq
    else:
        raise NumericalFailureError(
            "Jacobi sweeps did not converge", matrix_norm=norm,
            iterations=JACOBI_MAX_SWEEPS)

    eigs = np.diag(a).copy()
    order = np.argsort(eigs, kind="stable")
    return SymEig(eigs[order], v[:, order])


def _balance(a: np.ndarray) -> np.ndarray:
    """Parlett-Reinsch balancing by powers of two (similarity scaling)."""
    n = a.shape[0]
    radix = 2.0
    done = False
    while not done:
        done = True
        for i in range(n):
            r = float(np.sum(np.abs(a[i, :]))) - abs(a[i, i])
            c = float(np.sum(np.abs(a[:, i]))) - abs(a[i, i])
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            g = r / radix
            while c < g:
                f *= radix
                c *= radix * radix
            g = r * radix
            while c > g:
                f /= radix
                c /= radix * radix
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] *= 1.0 / f
                a[:, i] *= f
    return a


def _hessenberg(a: np.ndarray) -> np.ndarray:
    """Reduce to upper Hessenberg form by Householder reflections."""
    n = a.shape[0]
    for k in range(n - 2):
        x = a[k + 1:, k]
        norm_x = float(np.linalg.norm(x))
        if norm_x == 0.0:
            continue
        v = x.copy()
        v[0] += math.copysign(norm_x, x[0])
        vn = float(np.linalg.norm(v))
        if vn == 0.0:
            continue
        v /= vn
        a[k + 1:, k:] -= 2.0 * np.outer(v, v @ a[k + 1:, k:])
        a[:, k + 1:] -= 2.0 * np.outer(a[:, k + 1:] @ v, v)
        a[k + 2:, k] = 0.0
    return a


def _reflect_columns(h: np.ndarray, k: int, col: np.ndarray) -> None:
    """Apply the Householder reflector mapping col to +-|col| e1 at rows k..k+m."""
    m = col.shape[0]
    norm = float(np.linalg.norm(col))
    if norm == 0.0:
        return
    v = col.copy()
    v[0] += math.copysign(norm, col[0])
    vn = float(np.linalg.norm(v))
    if vn == 0.0:
        return
    v /= vn
    h[k:k + m, :] -= 2.0 * np.outer(v, v @ h[k:k + m, :])
    h[:, k:k + m] -= 2.0 * np.outer(h[:, k:k + m] @ v, v)


def _francis_qr(h: np.ndarray, hnorm: float) -> np.ndarray:
    """Iterate implicit double-shift QR steps until quasi-triangular."""
    n = h.shape[0]
    max_total = QR_MAX_ITERS_FACTOR * max(n, 1)
    total = 0
    hi = n - 1
    block_iters = 0
    # Subdiagonal entries at the global noise floor eps*||A|| must deflate even
    # between small equal diagonal entries, else near-exact shifts produce
    # degenerate (no-op) reflectors and the sweep stalls.  Zeroing an entry of
    # that size is a perturbation within the iteration's own backward error.
    floor = hnorm if hnorm > 0 else 1.0
    while hi > 0:
        # deflate: scan for a negligible subdiagonal entry above `hi`
        lo = hi
        while lo > 0:
            s = abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])
            if abs(h[lo, lo - 1]) <= _EPS * max(s, floor):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            hi -= 1
            block_iters = 0
            continue
        if lo == hi - 1:
            hi -= 2
            block_iters = 0
            continue

        block_iters += 1
        total += 1
        if total > max_total:
            raise NumericalFailureError(
                "QR iteration did not converge", matrix_norm=hnorm, iterations=total)
        if block_iters % 10 == 0:
            # exceptional shift to break symmetric stalls
            w = abs(h[hi, hi - 1]) + abs(h[hi - 1, hi - 2])
            s_sh = 1.5 * w
            t_sh = w * w
        else:
            s_sh = h[hi - 1, hi - 1] + h[hi, hi]
            t_sh = h[hi - 1, hi - 1] * h[hi, hi] - h[hi - 1, hi] * h[hi, hi - 1]

        # first column of (H - aI)(H - bI) restricted to the active block
        x = h[lo, lo] * h[lo, lo] + h[lo, lo + 1] * h[lo + 1, lo] - s_sh * h[lo, lo] + t_sh
        y = h[lo + 1, lo] * (h[lo, lo] + h[lo + 1, lo + 1] - s_sh)
        z = h[lo + 1, lo] * h[lo + 2, lo + 1]
        for k in range(lo, hi - 1):
            _reflect_columns(h, k, np.array([x, y, z]))
            x = h[k + 1, k]
            y = h[k + 2, k]
            z = h[k + 3, k] if k + 3 <= hi else 0.0
        _reflect_columns(h, hi - 1, np.array([x, y]))
        # the chase leaves rounding dust strictly below the first subdiagonal
        for j in range(lo, hi - 1):
            h[j + 2: hi + 1, j] = 0.0
    return h


def real_eigenvalues(matrix, imag_tol: float = DEFAULT_IMAG_TOL) -> np.ndarray:
    """Real eigenvalues of a general square matrix, ascending, with multiplicity.

    Eigenvalues from 2x2 Schur blocks are kept only when their imaginary
    magnitude is at most ``imag_tol * (1 + |real part|)``.  Raises
    ``NumericalFailureError`` if the QR iteration exhausts its budget.
    """
    a = _as_square(matrix)
    n = a.shape[0]
    if n == 0:
        return np.array([])
    if n == 1:
        return np.array([a[0, 0]])
    hnorm = float(np.linalg.norm(a))
    h = _hessenberg(_balance(a.copy()))
    h = _francis_qr(h, hnorm)

    out: list[float] = []
    i = 0
    while i < n:
        if i == n - 1 or abs(h[i + 1, i]) <= _EPS * (abs(h[i, i]) + abs(h[i + 1, i + 1])):
            out.append(float(h[i, i]))
            i += 1
            continue
        avg = 0.5 * (h[i, i] + h[i + 1, i + 1])
        disc = (0.5 * (h[i, i] - h[i + 1, i + 1])) ** 2 + h[i, i + 1] * h[i + 1, i]
        if disc >= 0.0:
            sq = math.sqrt(disc)
            out.extend([avg - sq, avg + sq])
        else:
            imag = math.sqrt(-disc)
            if imag <= imag_tol * (1.0 + abs(avg)):
                out.extend([avg, avg])
        i += 2
    return np.sort(np.array(out))


def _det_bareiss_int(m: list[list[int]]) -> int:
    """Exact determinant of an integer matrix by fraction-free elimination."""
    n = len(m)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for r in range(k + 1, n):
                if m[r][k] != 0:
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det(matrix) -> float:
    """Determinant via pivoted elimination; exact for integer matrices.

    Integer input is routed through fraction-free Bareiss elimination so that
    exactly singular integer matrices return exactly 0.0 with the right sign.
    """
    a = _as_square(matrix)
    n = a.shape[0]
    if n == 0:
        return 1.0
    if np.all(a == np.round(a)) and np.all(np.abs(a) < 2.0**53):
        return float(_det_bareiss_int([[int(x) for x in row] for row in a]))
    u = a.copy()
    sign = 1.0
    val = 1.0
    for k in range(n):
        p = k + int(np.argmax(np.abs(u[k:, k])))
        if u[p, k] == 0.0:
            return 0.0
        if p != k:
            u[[k, p], :] = u[[p, k], :]
            sign = -sign
        val *= float(u[k, k])
        if k + 1 < n:
            u[k + 1:, k:] -= np.outer(u[k + 1:, k] / u[k, k], u[k, k:])
    return sign * val


def solve_linear(matrix, rhs, tol: float = DEFAULT_PIVOT_RTOL) -> np.ndarray:
    """Solve A x = b by Gaussian elimination with partial pivoting.

    Raises ``SingularSystemError`` when the best available pivot falls below
    ``tol * ||A||_F``.
    """
    x = solve_linear_many(matrix, np.asarray(rhs, dtype=float).reshape(-1, 1), tol)
    return x[:, 0]


def solve_linear_many(matrix, rhs: np.ndarray, tol: float = DEFAULT_PIVOT_RTOL) -> np.ndarray:
    """Solve A X = B for a matrix of right-hand sides (shared factorization)."""
    a = _as_square(matrix)
    b = np.array(rhs, dtype=float)
    n = a.shape[0]
    if b.ndim == 1:
        b = b.reshape(-1, 1)
    if b.shape[0] != n:
        raise InvalidInputError(
            f"dimension mismatch: matrix is {n}x{n}, rhs has {b.shape[0]} rows")
    if n == 0:
        return b
    threshold = tol * float(np.linalg.norm(a))
    u = a.copy()
    for k in range(n):
        p = k + int(np.argmax(np.abs(u[k:, k])))
        if abs(u[p, k]) <= threshold:
            raise SingularSystemError(
                f"pivot {abs(u[p, k]):.3e} below threshold {threshold:.3e} at column {k}")
        if p != k:
            u[[k, p], :] = u[[p, k], :]
            b[[k, p], :] = b[[p, k], :]
        if k + 1 < n:
            l = u[k + 1:, k] / u[k, k]
            u[k + 1:, k:] -= np.outer(l, u[k, k:])
            b[k + 1:, :] -= np.outer(l, b[k, :])
    x = np.zeros_like(b)
    for k in range(n - 1, -1, -1):
        x[k, :] = (b[k, :] - u[k, k + 1:] @ x[k + 1:, :]) / u[k, k]
    return x
