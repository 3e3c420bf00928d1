"""Random and targeted instance generation.

Random instances draw a symmetric Gaussian Q and shift its spectrum so the
smallest eigenvalue is strictly negative (uniform in [-2, -0.1]), matching
the standing nonconvexity assumption.  Targeted generation rejection-samples
until the classifier confirms a local-nonglobal minimizer.
"""

from __future__ import annotations

import numpy as np

from . import prs, trs
from .errors import GenerationFailureError, InvalidInputError
from .instances import ParsedInstance
from .prs import PrsInstance
from .trs import Classification, TrsInstance

MAX_REJECTIONS = 100_000


def random_qc(n: int, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    g = rng.normal(size=(n, n))
    q = 0.5 * (g + g.T)
    alphas = np.linalg.eigvalsh(q) if n > 1 else np.diag(q)
    shift = float(alphas[0]) + float(rng.uniform(0.1, 2.0))
    q = q - shift * np.eye(n)
    c = rng.normal(size=n)
    return q, c


def random_instance(problem: str, n: int, rng: np.random.Generator,
                    sigma: float = 1.0, p: float = 3.0
                    ) -> TrsInstance | PrsInstance:
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n}")
    q, c = random_qc(n, rng)
    if problem == "trs":
        return TrsInstance(q=q, c=c)
    if problem == "prs":
        return PrsInstance(q=q, c=c, sigma=sigma, p_exponent=p)
    raise InvalidInputError(f"unknown problem {problem!r}")


def _has_lng(inst) -> bool:
    if isinstance(inst, TrsInstance):
        pts = trs.classify(trs.enumerate_kkt(inst), trs.to_spectral(inst))
    else:
        pts = prs.classify(prs.enumerate_critical(inst), prs.to_spectral(inst), inst)
    return any(p.classification is Classification.LOCAL_NONGLOBAL for p in pts)


def targeted_lng_instance(problem: str, n: int, rng: np.random.Generator,
                          sigma: float = 1.0, p: float = 3.0,
                          max_rejections: int = MAX_REJECTIONS
                          ) -> tuple[TrsInstance | PrsInstance, int]:
    """An instance whose classifier confirms a local-nonglobal minimizer.

    Returns the instance and the rejection count.  A distinct pair of leading
    eigenvalues and a live leading component are necessary, so n = 1 can never
    succeed and fails fast.
    """
    if n < 1:
        raise InvalidInputError(f"n must be positive, got {n}")
    if n < 2:
        raise GenerationFailureError(
            "a local-nonglobal minimizer requires n >= 2", rejections=0)
    for rejections in range(max_rejections):
        inst = random_instance(problem, n, rng, sigma=sigma, p=p)
        if _has_lng(inst):
            return inst, rejections
    raise GenerationFailureError(
        "no local-nonglobal instance found", rejections=max_rejections)


def as_parsed(inst: TrsInstance | PrsInstance) -> ParsedInstance:
    """Wrap a core instance in the file-level carrier (unit radius)."""
    if isinstance(inst, TrsInstance):
        raw = {"problem": "trs", "n": inst.n, "Q": inst.q.tolist(),
               "c": inst.c.tolist(), "radius": 1.0}
        return ParsedInstance(problem="trs", instance=inst, radius=1.0, raw=raw)
    raw = {"problem": "prs", "n": inst.n, "Q": inst.q.tolist(),
           "c": inst.c.tolist(), "sigma": inst.sigma, "p": inst.p_exponent}
    return ParsedInstance(problem="prs", instance=inst, radius=1.0, raw=raw)
