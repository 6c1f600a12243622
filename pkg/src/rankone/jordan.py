"""Jordan-form test matrices, structural minimal polynomials and the
Brunovsky reduction of a triple (A, u, v^T) with A in Jordan form."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .poly import Poly, from_roots

__all__ = [
    "JordanSpec",
    "build_matrix",
    "minimal_polynomial",
    "quotient_q",
    "characteristic_polynomial",
    "gcd_m_dm",
    "decompose",
    "toeplitz_transform",
    "brunovsky_reduce",
    "genericity_check",
    "brunovsky_chains",
]

DEDUPE_EPS = 1e-8
GENERIC_EPS = 1e-12


@dataclass(frozen=True)
class JordanSpec:
    """Eigenvalues with their Jordan block sizes, largest block first."""

    blocks: tuple[tuple[complex, tuple[int, ...]], ...]

    def __post_init__(self):
        blocks = tuple((complex(lam), tuple(int(s) for s in sizes)) for lam, sizes in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        if not blocks:
            raise ValueError("JordanSpec needs at least one eigenvalue")
        for lam, sizes in blocks:
            if not np.isfinite(lam):
                raise ValueError("eigenvalues must be finite")
            if not sizes or min(sizes) < 1:
                raise ValueError(f"block sizes at {lam} must be positive and nonempty")
            if list(sizes) != sorted(sizes, reverse=True):
                raise ValueError(f"block sizes at {lam} must be sorted descending")
        lams = [lam for lam, _ in blocks]
        for i in range(len(lams)):
            for j in range(i):
                if abs(lams[i] - lams[j]) <= DEDUPE_EPS:
                    raise ValueError(f"eigenvalues {lams[j]} and {lams[i]} are not distinct")

    @classmethod
    def of(cls, pairs: Sequence[tuple[complex, Sequence[int]]]) -> "JordanSpec":
        return cls(tuple((lam, tuple(sizes)) for lam, sizes in pairs))

    @property
    def n(self) -> int:
        return sum(sum(sizes) for _, sizes in self.blocks)

    @property
    def eigenvalues(self) -> list[complex]:
        return [lam for lam, _ in self.blocks]

    @property
    def largest(self) -> list[int]:
        """n_{j,1} for every eigenvalue."""
        return [sizes[0] for _, sizes in self.blocks]

    @property
    def l(self) -> int:
        return sum(self.largest)

    def segments(self):
        """Yield ``(j, i, offset, size)`` for every block in flat-vector order."""
        off = 0
        for j, (_, sizes) in enumerate(self.blocks):
            for i, k in enumerate(sizes):
                yield j, i, off, k
                off += k


def build_matrix(spec: JordanSpec) -> np.ndarray:
    A = np.zeros((spec.n, spec.n), dtype=complex)
    for j, _, off, k in spec.segments():
        lam = spec.blocks[j][0]
        for t in range(k):
            A[off + t, off + t] = lam
            if t + 1 < k:
                A[off + t, off + t + 1] = 1.0
    return A


def _power_product(spec: JordanSpec, exponents: Sequence[int]) -> Poly:
    roots: list[complex] = []
    for lam, e in zip(spec.eigenvalues, exponents):
        roots.extend([lam] * e)
    return from_roots(roots)


def minimal_polynomial(spec: JordanSpec) -> Poly:
    return _power_product(spec, spec.largest)


def quotient_q(spec: JordanSpec) -> Poly:
    return _power_product(spec, [sum(sizes[1:]) for _, sizes in spec.blocks])


def characteristic_polynomial(spec: JordanSpec) -> Poly:
    return _power_product(spec, [sum(sizes) for _, sizes in spec.blocks])


def gcd_m_dm(spec: JordanSpec) -> Poly:
    """gcd(m, m') built from the structure: prod (lam_j - .)^(n_{j,1} - 1)."""
    return _power_product(spec, [k - 1 for k in spec.largest])


def decompose(spec: JordanSpec, w) -> list[list[np.ndarray]]:
    """Split a flat vector into per-eigenvalue, per-block segments."""
    w = np.asarray(w, dtype=complex).ravel()
    if w.size != spec.n:
        raise ValueError(f"vector length {w.size} does not match dimension {spec.n}")
    out: list[list[np.ndarray]] = [[] for _ in spec.blocks]
    for j, _, off, k in spec.segments():
        out[j].append(w[off: off + k].copy())
    return out


def toeplitz_transform(spec: JordanSpec, v) -> np.ndarray:
    """Block-diagonal upper-triangular Toeplitz matrix T_v; commutes with A."""
    v = np.asarray(v, dtype=complex).ravel()
    T = np.zeros((spec.n, spec.n), dtype=complex)
    for _, _, off, k in spec.segments():
        row = v[off: off + k]
        for d in range(k):
            idx = np.arange(k - d)
            T[off + idx, off + idx + d] = row[d]
    return T


def genericity_check(spec: JordanSpec, v, eps: float = GENERIC_EPS) -> bool:
    v = np.asarray(v, dtype=complex).ravel()
    if v.size != spec.n:
        raise ValueError(f"vector length {v.size} does not match dimension {spec.n}")
    return all(abs(v[off]) > eps for _, _, off, _ in spec.segments())


def brunovsky_reduce(spec: JordanSpec, u, v, eps: float = GENERIC_EPS):
    """Return ``(T_v u, v^T T_v^{-1}, ok)``.

    When some leading block entry of ``v`` vanishes the transform is
    singular; the inputs come back unchanged with ``ok = False``.
    """
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    if u.size != spec.n:
        raise ValueError(f"vector length {u.size} does not match dimension {spec.n}")
    if not genericity_check(spec, v, eps):
        return u.copy(), v.copy(), False
    T = toeplitz_transform(spec, v)
    u_new = T @ u
    v_new = np.zeros(spec.n, dtype=complex)
    for _, _, off, _ in spec.segments():
        v_new[off] = 1.0
    return u_new, v_new, True


def brunovsky_chains(spec: JordanSpec) -> list[tuple[int, list[np.ndarray]]]:
    """Jordan chains of A + tau u v^T at each eigenvalue, valid when v is in
    Brunovsky form (every block segment of v equal to e_1).

    Block i >= 2 of eigenvalue j contributes the chain
    e_{j,1,t} - e_{j,i,t} for t = 1..n_{j,i}. Returns ``(j, chain)`` pairs.
    """
    out = []
    offsets: dict[int, list[tuple[int, int]]] = {}
    for j, _, off, k in spec.segments():
        offsets.setdefault(j, []).append((off, k))
    for j, segs in offsets.items():
        first = segs[0][0]
        for off, k in segs[1:]:
            chain = []
            for t in range(k):
                x = np.zeros(spec.n, dtype=complex)
                x[first + t] = 1.0
                x[off + t] = -1.0
                chain.append(x)
            out.append((j, chain))
    return out
