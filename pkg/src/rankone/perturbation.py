"""The rank-one family B(tau) = A + tau u v^T.

The characteristic polynomial factors as ``q * (m - tau p_uv)`` where m is
the minimal polynomial of A, q = det(lambda - A) / m, and
p_uv = m(lambda) v^T (lambda - A)^{-1} u.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from . import _dd
from .jordan import (
    JordanSpec,
    build_matrix,
    minimal_polynomial,
    quotient_q,
)
from .poly import Poly, RootSet, find_roots, from_roots

__all__ = [
    "PerturbationSystem",
    "SpectrumAtTau",
    "StructureReport",
    "compute_p_uv",
    "p_uv_tau",
    "char_poly_B",
    "faddeev_leverrier",
    "oracle_char_poly",
    "spectrum",
    "numerical_rank",
    "weyr_to_segre",
    "verify_structure_at_A",
    "OVERLAP_EPS",
]

ORACLE_N_MAX = 64
RANK_TOL = 1e-8
OVERLAP_EPS = 1e-6


@dataclass(frozen=True, eq=False)
class PerturbationSystem:
    """A, u, v together with the cached polynomials m, q and p_uv.

    ``dense`` marks systems built from an explicit matrix; for those A is
    assumed nonderogatory, so m is the characteristic polynomial and q = 1,
    and ``spec`` is inferred from the roots of m (one block per eigenvalue).
    """

    spec: JordanSpec
    A: np.ndarray
    u: np.ndarray
    v: np.ndarray
    m: Poly
    q: Poly
    p_uv: Poly
    dense: bool = False

    @classmethod
    def from_jordan(cls, spec: JordanSpec, u, v) -> "PerturbationSystem":
        u, v = _vectors(u, v, spec.n)
        return cls(spec, build_matrix(spec), u, v, minimal_polynomial(spec),
                   quotient_q(spec), compute_p_uv(spec, u, v))

    @classmethod
    def from_dense(cls, A, u, v) -> "PerturbationSystem":
        A = np.asarray(A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(A)):
            raise ValueError("matrix entries must be finite")
        u, v = _vectors(u, v, A.shape[0])
        charpoly, adj = faddeev_leverrier(A)
        # v^T adj(lambda - A) u, highest power first in ``adj``.
        n = A.shape[0]
        p = np.array([v @ adj[k] @ u for k in range(n)], dtype=complex)[::-1]
        return cls(_infer_spec(charpoly), A, u, v, charpoly, Poly([1.0]), Poly(p), dense=True)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def l(self) -> int:
        return self.m.degree

    @property
    def eigenvalues(self) -> list[complex]:
        return self.spec.eigenvalues

    @property
    def generic_degree(self) -> bool:
        return self.p_uv.degree == self.l - 1

    def B(self, tau: complex) -> np.ndarray:
        return self.A + complex(tau) * np.outer(self.u, self.v)

    def with_vectors(self, u, v) -> "PerturbationSystem":
        if self.dense:
            return PerturbationSystem.from_dense(self.A, u, v)
        return PerturbationSystem.from_jordan(self.spec, u, v)


def _vectors(u, v, n):
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    if u.size != n or v.size != n:
        raise ValueError(f"vectors must have length {n} (got {u.size}, {v.size})")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ValueError("vector entries must be finite")
    return u, v


def _infer_spec(charpoly: Poly) -> JordanSpec:
    rs = find_roots(charpoly)
    return JordanSpec.of([(lam, [int(k)]) for lam, k in zip(rs.roots, rs.multiplicities)])


def compute_p_uv(spec: JordanSpec, u, v) -> Poly:
    """Assemble p_uv block by block without evaluating the resolvent.

    For a Jordan block J_k(lam) the resolvent has (lambda - lam)^{-(d+1)} on
    its d-th superdiagonal, so v_blk^T (lambda - J)^{-1} u_blk contributes
    c_d (lambda - lam)^{-(d+1)} with c_d = sum_a v[a] u[a + d]. Multiplying
    by m cancels every pole since d < n_{j,1}.
    """
    u = np.asarray(u, dtype=complex).ravel()
    v = np.asarray(v, dtype=complex).ravel()
    lams = spec.eigenvalues
    largest = spec.largest
    local = [np.zeros(k, dtype=complex) for k in largest]
    for j, _, off, k in spec.segments():
        uu = u[off: off + k]
        vv = v[off: off + k]
        for d in range(k):
            local[j][d] += vv[: k - d] @ uu[d:]
    total = Poly()
    for j, lam in enumerate(lams):
        # sum_d c_d (lambda - lam)^(nj - 1 - d), expanded around lam.
        shifted = local[j][::-1]
        piece = _expand_about(shifted, lam)
        others: list[complex] = []
        for jj, lam2 in enumerate(lams):
            if jj != j:
                others.extend([lam2] * largest[jj])
        total = total + piece * from_roots(others)
    return total


def _expand_about(c_shift: np.ndarray, a: complex) -> Poly:
    """Poly with coefficients ``c_shift`` in powers of (lambda - a)."""
    out = Poly()
    base = Poly([-a, 1.0])
    power = Poly([1.0])
    for c in c_shift:
        if c != 0:
            out = out + power * complex(c)
        power = power * base
    return out


def p_uv_tau(sys: PerturbationSystem, tau: complex) -> Poly:
    return sys.m - sys.p_uv * complex(tau)


def char_poly_B(sys: PerturbationSystem, tau: complex) -> Poly:
    return sys.q * p_uv_tau(sys, tau)


def faddeev_leverrier(B) -> tuple[Poly, np.ndarray]:
    """Characteristic polynomial det(lambda - B) and adjugate coefficients.

    Returns ``(charpoly, M)`` with adj(lambda - B) = sum_k M[k] lambda^(n-1-k).
    """
    B = np.asarray(B, dtype=complex)
    n = B.shape[0]
    if n > ORACLE_N_MAX:
        raise ValueError(f"oracle limited to n <= {ORACLE_N_MAX}, got {n}")
    # The trace recurrence amplifies rounding by up to ~1e12 on modest
    # inputs, so it runs in double-double and is rounded once at the end.
    Bd = _dd.from_complex(B)
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1.0
    M = np.zeros((n, n, n), dtype=complex)
    Mk = _dd.from_complex(np.eye(n))
    for k in range(1, n + 1):
        M[k - 1] = _dd.to_complex(Mk)
        BM = _dd.matmul(Bd, Mk)
        ck = _dd.div_real(_dd.trace(BM), -float(k))
        c[n - k] = _dd.to_complex(ck)
        if k < n:
            diag = np.arange(n)
            Mk = tuple(p.copy() for p in BM)
            d = _dd.add(tuple(p[diag, diag] for p in Mk), ck)
            for p, dp in zip(Mk, d):
                p[diag, diag] = dp
    return Poly(c), M


def oracle_char_poly(B) -> Poly:
    return faddeev_leverrier(B)[0]


@dataclass(frozen=True, eq=False)
class SpectrumAtTau:
    tau: complex
    fixed_part: RootSet
    moving_part: RootSet
    overlap: list = field(default_factory=list)

    @property
    def simplicity_flags(self) -> np.ndarray:
        return self.moving_part.multiplicities == 1


def _structural_roots(lams, mults) -> RootSet:
    keep = [(lam, k) for lam, k in zip(lams, mults) if k > 0]
    roots = np.array([lam for lam, _ in keep], dtype=complex)
    mult = np.array([k for _, k in keep], dtype=int)
    return RootSet(roots, mult, np.zeros(len(keep)), 0, np.repeat(roots, mult))


def spectrum(sys: PerturbationSystem, tau: complex, initial=None) -> SpectrumAtTau:
    """Eigenvalues of B(tau) split into the part inherited from A (roots of q)
    and the part moving with tau (roots of p_{uv,tau})."""
    tau = complex(tau)
    lams = sys.eigenvalues
    fixed = _structural_roots(lams, [sum(s[1:]) for _, s in sys.spec.blocks]) \
        if not sys.dense else _structural_roots([], [])
    if tau == 0:
        moving = _structural_roots(lams, sys.spec.largest)
    else:
        moving = find_roots(p_uv_tau(sys, tau), initial=initial)
    overlap = [complex(z) for z in moving.roots
               if tau != 0 and any(abs(z - lam) <= OVERLAP_EPS for lam in lams)]
    return SpectrumAtTau(tau, fixed, moving, overlap)


def numerical_rank(M: np.ndarray, tol: float = RANK_TOL) -> int:
    """Rank from column-pivoted QR: count |R_ii| above tol * |R_00|."""
    if M.size == 0:
        return 0
    R = scipy.linalg.qr(M, mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0.0:
        return 0
    return int(np.sum(d > tol * d[0]))


def weyr_to_segre(nullities: list[int]) -> list[int]:
    """Block sizes (descending) from nullities of (B - lam)^k, k = 1, 2, ..."""
    d = [0] + list(nullities)
    w = [d[k] - d[k - 1] for k in range(1, len(d))] + [0]
    sizes: list[int] = []
    for k in range(len(w) - 1, 0, -1):
        sizes.extend([k] * (w[k - 1] - w[k]))
    return sorted(sizes, reverse=True)


@dataclass(frozen=True, eq=False)
class StructureReport:
    tau: complex
    n: int
    blocks: list  # (eigenvalue, observed block sizes)
    expected: list  # (eigenvalue, [n_{j,2}, ..., n_{j,k_j}])
    moving: np.ndarray
    moving_ranks: list

    @property
    def survives(self) -> bool:
        return all(obs == exp for (_, obs), (_, exp) in zip(self.blocks, self.expected))

    @property
    def nonderogatory(self) -> bool:
        return all(r == self.n - 1 for r in self.moving_ranks)


def verify_structure_at_A(sys: PerturbationSystem, tau: complex,
                          rank_tol: float = RANK_TOL) -> StructureReport:
    """Jordan block sizes of B(tau) at every eigenvalue of A, from ranks of
    powers of B(tau) - lam, plus the rank of B(tau) - mu at each moving
    eigenvalue mu."""
    tau = complex(tau)
    if tau == 0:
        raise ValueError("structure verification requires tau != 0")
    B = sys.B(tau)
    n = sys.n
    eye = np.eye(n, dtype=complex)
    blocks = []
    for lam in sys.eigenvalues:
        M = B - lam * eye
        P = eye
        nulls: list[int] = []
        for _ in range(n):
            P = P @ M
            nulls.append(n - numerical_rank(P, rank_tol))
            if len(nulls) >= 2 and nulls[-1] == nulls[-2]:
                break
            if nulls[-1] == 0:
                break
        blocks.append((lam, weyr_to_segre(nulls)))
    expected = [(lam, list(sizes[1:])) for lam, sizes in sys.spec.blocks]
    moving = spectrum(sys, tau).moving_part.roots
    ranks = [numerical_rank(B - mu * eye, rank_tol) for mu in moving]
    return StructureReport(tau, n, blocks, expected, moving, ranks)
