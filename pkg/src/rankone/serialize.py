"""Problem files in, JSON / CSV out.

Complex scalars travel as ``[re, im]`` pairs (a bare real is accepted on
input).  Every float is written with 17 significant digits so a value read
back is bit-identical to the one written.
"""

from __future__ import annotations

import json
import math
from numbers import Number
from typing import Any

import numpy as np

from .jordan import JordanSpec
from .perturbation import PerturbationSystem
from .poly import Poly

__all__ = [
    "ProblemError",
    "Problem",
    "parse_complex",
    "parse_problem",
    "load_problem",
    "random_vectors",
    "dumps",
    "to_jsonable",
    "curves_csv",
]


class ProblemError(ValueError):
    """Malformed or inconsistent problem description."""


# -- input ------------------------------------------------------------------

def parse_complex(x) -> complex:
    if isinstance(x, bool):
        raise ProblemError(f"expected a number or [re, im] pair, got {x!r}")
    if isinstance(x, Number):
        z = complex(x)
    elif isinstance(x, (list, tuple)) and len(x) == 2 and all(
            isinstance(t, Number) and not isinstance(t, bool) for t in x):
        z = complex(float(x[0]), float(x[1]))
    else:
        raise ProblemError(f"expected a number or [re, im] pair, got {x!r}")
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ProblemError(f"non-finite value {x!r}")
    return z


def _parse_vector(x, name: str) -> np.ndarray:
    if not isinstance(x, list) or not x:
        raise ProblemError(f"{name} must be a nonempty list or \"random\"")
    return np.array([parse_complex(t) for t in x], dtype=complex)


def _parse_jordan(entries) -> JordanSpec:
    if not isinstance(entries, list) or not entries:
        raise ProblemError("\"jordan\" must be a nonempty list")
    pairs = []
    for e in entries:
        if not isinstance(e, dict) or set(e) != {"eigenvalue", "blocks"}:
            raise ProblemError("each jordan entry needs exactly \"eigenvalue\" and \"blocks\"")
        blocks = e["blocks"]
        if not isinstance(blocks, list) or not all(
                isinstance(b, int) and not isinstance(b, bool) for b in blocks):
            raise ProblemError(f"blocks must be a list of integers, got {blocks!r}")
        pairs.append((parse_complex(e["eigenvalue"]), blocks))
    try:
        return JordanSpec.of(pairs)
    except ValueError as err:
        raise ProblemError(str(err)) from err


def _parse_dense(rows) -> np.ndarray:
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ProblemError("\"dense\" must be a nonempty list of rows")
    A = np.array([[parse_complex(t) for t in r] for r in rows if len(r) == len(rows)], dtype=complex)
    if A.shape != (len(rows), len(rows)):
        raise ProblemError("dense matrix must be square")
    return A


def random_vectors(rng: np.random.Generator, n: int, count: int = 2) -> list[np.ndarray]:
    """Independent standard complex Gaussian vectors (E|z|^2 = 1), drawn in order."""
    return [(rng.standard_normal(n) + 1j * rng.standard_normal(n)) / math.sqrt(2)
            for _ in range(count)]


class Problem:
    """Parsed problem file: the matrix part plus (possibly random) u, v."""

    def __init__(self, spec: JordanSpec | None, dense: np.ndarray | None, u, v, seed):
        self.spec = spec
        self.dense = dense
        self.u_raw = u
        self.v_raw = v
        self.seed = seed

    @property
    def n(self) -> int:
        return self.spec.n if self.spec is not None else self.dense.shape[0]

    def system(self, u=None, v=None) -> PerturbationSystem:
        """Build the system; explicit ``u``, ``v`` override the file's vectors."""
        if u is None or v is None:
            u, v = self.vectors()
        if self.spec is not None:
            return PerturbationSystem.from_jordan(self.spec, u, v)
        return PerturbationSystem.from_dense(self.dense, u, v)

    def vectors(self):
        n = self.n
        rng = np.random.default_rng(self.seed) if self.seed is not None else None
        out = []
        for raw in (self.u_raw, self.v_raw):
            if isinstance(raw, str):
                out.append(random_vectors(rng, n, 1)[0])
            else:
                out.append(raw)
        for name, w in zip("uv", out):
            if w.size != n:
                raise ProblemError(f"{name} has length {w.size}, matrix has size {n}")
        return out

    def matrix_json(self) -> dict:
        if self.spec is not None:
            return {"jordan": [{"eigenvalue": complex(lam), "blocks": list(b)}
                               for lam, b in self.spec.blocks]}
        return {"dense": self.dense}


def parse_problem(obj: Any, require_vectors: bool = True) -> Problem:
    if not isinstance(obj, dict):
        raise ProblemError("problem must be a JSON object")
    known = {"jordan", "dense", "u", "v", "seed"}
    extra = set(obj) - known
    if extra:
        raise ProblemError(f"unknown keys: {sorted(extra)}")
    if ("jordan" in obj) == ("dense" in obj):
        raise ProblemError("give exactly one of \"jordan\" or \"dense\"")
    spec = _parse_jordan(obj["jordan"]) if "jordan" in obj else None
    dense = _parse_dense(obj["dense"]) if "dense" in obj else None
    seed = obj.get("seed")
    if seed is not None and (isinstance(seed, bool) or not isinstance(seed, int) or seed < 0):
        raise ProblemError("seed must be a nonnegative integer")
    vecs = []
    for name in ("u", "v"):
        raw = obj.get(name, "random" if not require_vectors else None)
        if raw is None:
            raise ProblemError(f"missing \"{name}\"")
        if isinstance(raw, str):
            if raw != "random":
                raise ProblemError(f"{name} must be a list or \"random\"")
            if seed is None and require_vectors:
                raise ProblemError("\"seed\" is required when a vector is \"random\"")
            vecs.append(raw)
        else:
            vecs.append(_parse_vector(raw, name))
    prob = Problem(spec, dense, vecs[0], vecs[1], seed)
    if require_vectors:
        prob.vectors()  # dimension check
    return prob


def load_problem(path: str, require_vectors: bool = True) -> Problem:
    try:
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
    except json.JSONDecodeError as err:
        raise ProblemError(f"{path}: invalid JSON ({err})") from err
    return parse_problem(obj, require_vectors)


# -- output -----------------------------------------------------------------

def fmt(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    return "0" if s == "-0" else s


def to_jsonable(x):
    """Plain Python structure; complex numbers become [re, im] pairs."""
    if isinstance(x, Poly):
        return [to_jsonable(complex(c)) for c in x.coeffs]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (float, np.floating)):
        return float(x)
    if isinstance(x, np.ndarray):
        return [to_jsonable(t) for t in x.tolist()]
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(t) for t in x]
    if x is None or isinstance(x, str):
        return x
    raise TypeError(f"cannot serialize {type(x).__name__}")


def _emit(x, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if isinstance(x, bool):
        return "true" if x else "false"
    if x is None:
        return "null"
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return fmt(x)
    if isinstance(x, str):
        return json.dumps(x)
    if isinstance(x, list):
        if not x:
            return "[]"
        if all(not isinstance(t, (list, dict)) for t in x):
            return "[" + ", ".join(_emit(t, indent, level + 1) for t in x) + "]"
        return "[\n" + ",\n".join(pad + _emit(t, indent, level + 1) for t in x) + "\n" + end + "]"
    if isinstance(x, dict):
        if not x:
            return "{}"
        items = [pad + json.dumps(k) + ": " + _emit(v, indent, level + 1) for k, v in x.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    raise TypeError(f"cannot serialize {type(x).__name__}")


def dumps(x, indent: int = 2) -> str:
    return _emit(to_jsonable(x), indent, 0) + "\n"


def curves_csv(bundle) -> str:
    """One row per (tau, branch): tau,branch,re,im."""
    lines = ["tau,branch,re,im"]
    for t, col in zip(bundle.taus, bundle.branches.T):
        ts = fmt(t)
        for b, z in enumerate(col):
            lines.append(f"{ts},{b},{fmt(z.real)},{fmt(z.imag)}")
    return "\n".join(lines) + "\n"
