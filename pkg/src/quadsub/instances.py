"""Instance file schema: parsing, validation, serialization.

Instances are JSON objects:

    {"problem": "trs", "n": 2, "Q": [[...], [...]], "c": [...], "radius": 1.0}
    {"problem": "prs", "n": 2, "Q": [[...], [...]], "c": [...],
     "sigma": 1.0, "p": 3.0}

A ball radius other than 1 is folded into the core unit-ball instance by the
substitution x = radius * y, i.e. solving (radius^2 Q, radius c); reports
rescale solutions back (x by radius, multipliers by radius^-2).
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass

import numpy as np

from .errors import ParseError
from .prs import PrsInstance
from .trs import TrsInstance

FILE_SYM_RTOL = 1e-9


@dataclass(frozen=True)
class ParsedInstance:
    """A validated instance plus the file-level data needed for reporting."""

    problem: str
    instance: TrsInstance | PrsInstance
    radius: float
    raw: dict

    @property
    def n(self) -> int:
        return self.instance.n


def _require(data: dict, field: str):
    if field not in data:
        raise ParseError("missing required field", field=field)
    return data[field]


def _to_float_matrix(value, field: str, n: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"not a numeric matrix: {exc}", field=field) from None
    if arr.shape != (n, n):
        raise ParseError(f"expected shape ({n}, {n}), got {arr.shape}", field=field)
    if not np.all(np.isfinite(arr)):
        raise ParseError("non-finite entries", field=field)
    return arr


def _to_float_vector(value, field: str, n: int) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"not a numeric vector: {exc}", field=field) from None
    if arr.shape != (n,):
        raise ParseError(f"expected length {n}, got shape {arr.shape}", field=field)
    if not np.all(np.isfinite(arr)):
        raise ParseError("non-finite entries", field=field)
    return arr


def parse_instance(source) -> ParsedInstance:
    """Parse an instance from a dict, a JSON string, or a file path."""
    if isinstance(source, dict):
        data = source
    else:
        text = str(source)
        if not text.lstrip().startswith("{") and os.path.exists(text):
            with open(text, encoding="utf-8") as fh:
                text = fh.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc}", field=None) from None
    if not isinstance(data, dict):
        raise ParseError("instance must be a JSON object", field=None)

    problem = _require(data, "problem")
    if problem not in ("trs", "prs"):
        raise ParseError(f"unknown problem tag {problem!r}", field="problem")
    n = _require(data, "n")
    if not isinstance(n, int) or n < 1:
        raise ParseError(f"n must be a positive integer, got {n!r}", field="n")
    q = _to_float_matrix(_require(data, "Q"), "Q", n)
    c = _to_float_vector(_require(data, "c"), "c", n)
    qnorm = float(np.linalg.norm(q))
    if float(np.linalg.norm(q - q.T)) > FILE_SYM_RTOL * max(qnorm, 1.0):
        raise ParseError("Q is asymmetric beyond tolerance", field="Q")
    q = 0.5 * (q + q.T)

    if problem == "trs":
        if "sigma" in data or "p" in data:
            raise ParseError("sigma/p are not valid for the ball problem",
                             field="sigma" if "sigma" in data else "p")
        radius = data.get("radius", 1.0)
        if not (isinstance(radius, (int, float)) and np.isfinite(radius) and radius > 0):
            raise ParseError(f"radius must be positive, got {radius!r}", field="radius")
        radius = float(radius)
        inst = TrsInstance(q=radius**2 * q, c=radius * c)
        return ParsedInstance(problem="trs", instance=inst, radius=radius, raw=dict(data))

    if "radius" in data:
        raise ParseError("radius is not valid for the regularized problem",
                         field="radius")
    sigma = _require(data, "sigma")
    if not (isinstance(sigma, (int, float)) and np.isfinite(sigma) and sigma > 0):
        raise ParseError(f"sigma must be positive, got {sigma!r}", field="sigma")
    p = _require(data, "p")
    if not (isinstance(p, (int, float)) and np.isfinite(p) and p > 2):
        raise ParseError(f"p must exceed 2, got {p!r}", field="p")
    inst = PrsInstance(q=q, c=c, sigma=float(sigma), p_exponent=float(p))
    return ParsedInstance(problem="prs", instance=inst, radius=1.0, raw=dict(data))


def instance_to_dict(parsed: ParsedInstance) -> dict:
    """Canonical JSON form (the raw file data, normalized key order)."""
    data = parsed.raw
    out = {"problem": parsed.problem, "n": parsed.n,
           "Q": [[float(v) for v in row] for row in np.asarray(data["Q"], dtype=float)],
           "c": [float(v) for v in np.asarray(data["c"], dtype=float)]}
    if parsed.problem == "trs":
        out["radius"] = parsed.radius
    else:
        out["sigma"] = float(data["sigma"])
        out["p"] = float(data["p"])
    return out


def dump_json(obj) -> str:
    """Stable, diffable JSON: sorted keys, shortest round-trip floats."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def write_instance(path: str, parsed: ParsedInstance) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dump_json(instance_to_dict(parsed)))
        fh.write("\n")
