"""Dense univariate complex polynomials.

Coefficients are stored in ascending power order: ``coeffs[i]`` multiplies
``z**i``. The zero polynomial has an empty coefficient array.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import RootFindingError

__all__ = [
    "Poly",
    "RootSet",
    "RootFindingError",
    "TRIM_EPS",
    "evaluate",
    "derivative",
    "multiply",
    "divide",
    "exact_divide",
    "gcd_numeric",
    "sylvester_matrix",
    "resultant",
    "resultant_scale",
    "normalized_resultant",
    "find_roots",
    "from_roots",
    "taylor_shift",
]

TRIM_EPS = 1e-12
GCD_TOL = 1e-9
ROOT_MAX_ITERS = 200
ROOT_STEP_TOL = 1e-13
CLUSTER_EPS = 1e-7
ROOT_RESIDUAL_TOL = 1e-8

_EPS = np.finfo(float).eps


def _trim(c: np.ndarray, eps: float = TRIM_EPS) -> np.ndarray:
    if c.size == 0:
        return c
    mods = np.abs(c)
    top = mods.max()
    if top == 0.0:
        return c[:0]
    k = c.size
    while k > 0 and mods[k - 1] <= eps * top:
        k -= 1
    return c[:k]


class Poly:
    """Immutable dense polynomial over the complex numbers."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Iterable[complex] = (), trim_eps: float = TRIM_EPS):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        if not np.all(np.isfinite(c)):
            raise ValueError("polynomial coefficients must be finite")
        c = _trim(c, trim_eps).copy()
        c.flags.writeable = False
        self._c = c

    @classmethod
    def constant(cls, value: complex) -> "Poly":
        return cls([value])

    @classmethod
    def monomial(cls, degree: int, coeff: complex = 1.0) -> "Poly":
        c = np.zeros(degree + 1, dtype=complex)
        c[degree] = coeff
        return cls(c)

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return self._c.size - 1

    def is_zero(self) -> bool:
        return self._c.size == 0

    @property
    def lead(self) -> complex:
        return complex(self._c[-1]) if self._c.size else 0j

    def scale(self) -> float:
        """Largest coefficient modulus."""
        return float(np.abs(self._c).max()) if self._c.size else 0.0

    def norm(self) -> float:
        return float(np.linalg.norm(self._c))

    def monic(self) -> "Poly":
        if self.is_zero():
            raise ZeroDivisionError("zero polynomial has no monic form")
        return Poly(self._c / self._c[-1])

    def __call__(self, z):
        return evaluate(self, z)

    def deriv(self, k: int = 1) -> "Poly":
        p = self
        for _ in range(k):
            p = derivative(p)
        return p

    def __add__(self, other) -> "Poly":
        other = _as_poly(other)
        n = max(self._c.size, other._c.size)
        out = np.zeros(n, dtype=complex)
        out[: self._c.size] += self._c
        out[: other._c.size] += other._c
        return Poly(out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(-self._c)

    def __sub__(self, other) -> "Poly":
        return self + (-_as_poly(other))

    def __rsub__(self, other) -> "Poly":
        return _as_poly(other) - self

    def __mul__(self, other) -> "Poly":
        if isinstance(other, Poly):
            return multiply(self, other)
        return Poly(self._c * complex(other))

    __rmul__ = __mul__

    def __divmod__(self, other: "Poly"):
        return divide(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            return NotImplemented
        return self._c.shape == other._c.shape and bool(np.all(self._c == other._c))

    def __hash__(self):
        return hash(self._c.tobytes())

    def allclose(self, other: "Poly", rtol: float = 1e-10) -> bool:
        """Coefficient-wise comparison relative to the larger coefficient scale."""
        n = max(self._c.size, other._c.size)
        a = np.zeros(n, dtype=complex)
        b = np.zeros(n, dtype=complex)
        a[: self._c.size] = self._c
        b[: other._c.size] = other._c
        scale = max(self.scale(), other.scale(), 1e-300)
        return bool(np.max(np.abs(a - b), initial=0.0) <= rtol * scale)

    def __repr__(self) -> str:
        return f"Poly({[complex(x) for x in self._c]})"


def _as_poly(x) -> Poly:
    return x if isinstance(x, Poly) else Poly([complex(x)])


def evaluate(p: Poly, z):
    """Horner evaluation; ``z`` may be a scalar or an array."""
    z = np.asarray(z, dtype=complex)
    acc = np.zeros_like(z)
    for c in p.coeffs[::-1]:
        acc = acc * z + c
    return complex(acc) if acc.ndim == 0 else acc


def derivative(p: Poly) -> Poly:
    if p.degree < 1:
        return Poly()
    c = p.coeffs
    return Poly(c[1:] * np.arange(1, c.size))


def multiply(p: Poly, q: Poly) -> Poly:
    if p.is_zero() or q.is_zero():
        return Poly()
    return Poly(np.convolve(p.coeffs, q.coeffs))


def divide(p: Poly, d: Poly) -> tuple[Poly, Poly]:
    """Long division ``p = d*quotient + remainder`` with ``deg remainder < deg d``."""
    if d.is_zero():
        raise ZeroDivisionError("division by the zero polynomial")
    num = p.coeffs.copy()
    den = d.coeffs
    nd = den.size - 1
    if num.size - 1 < nd:
        return Poly(), p
    quot = np.zeros(num.size - nd, dtype=complex)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(num.size - 1, nd - 1, -1):
            coef = num[k] / den[-1]
            quot[k - nd] = coef
            num[k - nd: k + 1] -= coef * den
    # Remainder is not trimmed relative to itself: an exact division leaves
    # rounding noise that callers judge against the dividend's scale.
    rem = num[:nd]
    if not (np.all(np.isfinite(quot)) and np.all(np.isfinite(rem))):
        raise OverflowError("polynomial division overflowed")
    return Poly(quot), Poly(rem, trim_eps=0.0) if rem.size else Poly()


def exact_divide(p: Poly, d: Poly, rtol: float = 1e-9) -> Poly:
    """Quotient of a division known to be exact; raises if the remainder is not small."""
    quot, rem = divide(p, d)
    if rem.scale() > rtol * max(p.scale(), 1e-300):
        raise ArithmeticError(f"division is not exact (remainder scale {rem.scale():.3g})")
    return quot


def gcd_numeric(p: Poly, q: Poly, tol: float = GCD_TOL) -> Poly:
    """Monic approximate GCD by the Euclidean remainder sequence.

    A remainder is treated as zero once its coefficient norm drops below
    ``tol`` times the norm of the current dividend.
    """
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials is undefined")
    a, b = (p, q) if p.degree >= q.degree else (q, p)
    if b.is_zero():
        return a.monic()
    a = a.monic()
    b = b.monic()
    while True:
        _, r = divide(a, b)
        if r.is_zero() or r.norm() <= tol * a.norm():
            return b.monic()
        r = Poly(r.coeffs)
        if r.degree < 0:
            return b.monic()
        a, b = b, r.monic()
        if b.degree == 0:
            return Poly([1.0])


def sylvester_matrix(q1: Poly, q2: Poly) -> np.ndarray:
    """Sylvester matrix with rows of descending coefficients.

    ``deg q2`` shifted copies of ``q1`` followed by ``deg q1`` shifted
    copies of ``q2``.
    """
    if q1.is_zero() or q2.is_zero():
        raise ValueError("Sylvester matrix of a zero polynomial is undefined")
    n1, n2 = q1.degree, q2.degree
    size = n1 + n2
    S = np.zeros((size, size), dtype=complex)
    a = q1.coeffs[::-1]
    b = q2.coeffs[::-1]
    for i in range(n2):
        S[i, i: i + n1 + 1] = a
    for i in range(n1):
        S[n2 + i, i: i + n2 + 1] = b
    return S


def resultant(q1: Poly, q2: Poly) -> complex:
    """det S(q1, q2); LU with partial pivoting via LAPACK."""
    S = sylvester_matrix(q1, q2)
    if S.size == 0:
        return 1.0 + 0j
    return complex(np.linalg.det(S))


def resultant_scale(q1: Poly, q2: Poly) -> float:
    """Hadamard bound ``|q1|^deg q2 * |q2|^deg q1`` on ``|resultant(q1, q2)|``."""
    return q1.norm() ** q2.degree * q2.norm() ** q1.degree


def normalized_resultant(q1: Poly, q2: Poly) -> float:
    """``|resultant| / resultant_scale``; lies in [0, 1]."""
    return abs(resultant(q1, q2)) / resultant_scale(q1, q2)


def from_roots(roots: Sequence[complex]) -> Poly:
    c = np.array([1.0 + 0j])
    for r in roots:
        c = np.convolve(c, [-complex(r), 1.0])
    return Poly(c)


def taylor_shift(p: Poly, a: complex) -> Poly:
    """Coefficients of ``p(a + z)`` in powers of ``z``."""
    c = p.coeffs.copy()
    n = c.size
    for i in range(n - 1):
        for k in range(n - 2, i - 1, -1):
            c[k] += a * c[k + 1]
    return Poly(c)


@dataclass(frozen=True, eq=False)
class RootSet:
    roots: np.ndarray
    multiplicities: np.ndarray
    residuals: np.ndarray
    iterations: int = 0
    raw: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __len__(self) -> int:
        return len(self.roots)

    @property
    def count(self) -> int:
        return int(self.multiplicities.sum())

    def expanded(self) -> np.ndarray:
        """Roots repeated according to multiplicity."""
        return np.repeat(self.roots, self.multiplicities)

    def simple(self) -> np.ndarray:
        return self.multiplicities == 1


def _initial_guesses(c: np.ndarray) -> np.ndarray:
    # Perturbed circle centred at the root centroid, radius from the
    # geometric mean of the shifted polynomial's constant term.
    n = c.size - 1
    center = -c[n - 1] / (n * c[n])
    shifted = taylor_shift(Poly(c), center).coeffs
    if shifted.size < c.size:
        radius = 1.0
    else:
        mods = np.abs(shifted[:-1] / shifted[-1])
        ks = n - np.arange(n)
        with np.errstate(divide="ignore"):
            radius = float(np.max(mods ** (1.0 / ks)))
        if not np.isfinite(radius) or radius == 0.0:
            radius = 1.0
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    return center + radius * np.exp(1j * angles)


def _horner_with_bound(c: np.ndarray, z: np.ndarray):
    """p(z), p'(z) and a rounding-error bound for p(z)."""
    p = np.full_like(z, c[-1])
    dp = np.zeros_like(z)
    az = np.abs(z)
    bound = np.full(z.shape, abs(c[-1]))
    for coef in c[-2::-1]:
        dp = dp * z + p
        p = p * z + coef
        bound = bound * az + abs(coef)
    return p, dp, bound


def _aberth(c: np.ndarray, z0: np.ndarray, max_iters: int):
    z = z0.astype(complex).copy()
    n = z.size
    active = np.ones(n, dtype=bool)
    it = 0
    for it in range(1, max_iters + 1):
        p, dp, bound = _horner_with_bound(c, z)
        small = np.abs(p) <= 4 * n * _EPS * bound
        active &= ~small
        if not active.any():
            break
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        S = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = p / dp
            step = ratio / (1.0 - ratio * S)
        bad = ~np.isfinite(step)
        if bad.any():
            step[bad] = 1e-3 * (1.0 + np.abs(z[bad])) * np.exp(1j * it)
        step[~active] = 0.0
        z = z - step
        tiny = np.abs(step) <= ROOT_STEP_TOL * np.maximum(np.abs(z), 1.0)
        active &= ~tiny
        if not active.any():
            break
    p, _, bound = _horner_with_bound(c, z)
    converged = bool(np.all(np.abs(p) <= 1e3 * n * _EPS * np.maximum(bound, 1e-300))
                     or not active.any())
    return z, it, converged


def _inclusion_radii(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    # Each disk |w - z_i| <= n |p(z_i) / p'(z_i)| holds a root of p.
    n = c.size - 1
    p, dp, _ = _horner_with_bound(c, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = n * np.abs(p) / np.abs(dp)
    r[~np.isfinite(r)] = np.inf
    r[p == 0] = 0.0
    return r


def _cluster(z: np.ndarray, eps: float, radii: np.ndarray):
    order = np.argsort(z.real)
    z = z[order]
    radii = radii[order]
    labels = -np.ones(z.size, dtype=int)
    groups: list[list[int]] = []
    for i in range(z.size):
        if labels[i] >= 0:
            continue
        labels[i] = len(groups)
        members = [i]
        frontier = [i]
        while frontier:
            k = frontier.pop()
            for j in range(z.size):
                gap = abs(z[j] - z[k])
                if labels[j] < 0 and (gap <= eps * max(1.0, abs(z[k]))
                                      or gap <= radii[j] + radii[k]):
                    labels[j] = labels[i]
                    members.append(j)
                    frontier.append(j)
        groups.append(members)
    centers = np.array([z[g].mean() for g in groups], dtype=complex)
    mults = np.array([len(g) for g in groups], dtype=int)
    return centers, mults


def _polish(c: np.ndarray, z: complex, steps: int = 3) -> complex:
    p, dp, _ = _horner_with_bound(c, np.array([z]))
    best, best_res = z, abs(p[0])
    for _ in range(steps):
        if dp[0] == 0:
            break
        cand = best - p[0] / dp[0]
        p, dp, _ = _horner_with_bound(c, np.array([cand]))
        if abs(p[0]) < best_res:
            best, best_res = cand, abs(p[0])
        else:
            break
    return best


def find_roots(
    p: Poly,
    initial: np.ndarray | None = None,
    max_iters: int = ROOT_MAX_ITERS,
    cluster_eps: float = CLUSTER_EPS,
) -> RootSet:
    """All roots of ``p`` by Aberth-Ehrlich iteration plus Newton polishing.

    Exact zero roots (vanishing low-order coefficients) are split off first.
    Roots closer than ``cluster_eps * max(1, |z|)``, or whose Newton
    inclusion disks overlap, are merged into one entry with summed
    multiplicity. ``initial`` warm-starts the iteration.
    Raises :class:`RootFindingError` when the iteration does not converge.
    """
    if p.degree < 1:
        raise ValueError("find_roots needs a polynomial of degree >= 1")
    c = p.coeffs
    nzero = int(np.argmax(c != 0))
    c = c[nzero:]
    n = c.size - 1
    parts = [np.zeros(nzero, dtype=complex)]
    it = 0
    converged = True
    if n == 1:
        parts.append(np.array([-c[0] / c[1]]))
    elif n > 1:
        if initial is not None and len(initial) == n and np.all(np.isfinite(initial)):
            z0 = np.asarray(initial, dtype=complex)
            # Coincident warm starts stall the Aberth correction.
            if np.unique(np.round(z0, 14)).size < n:
                z0 = z0 + 1e-6 * (1 + np.abs(z0)) * np.exp(1j * (0.4 + 2 * np.pi * np.arange(n) / n))
        else:
            z0 = _initial_guesses(c)
        z, it, converged = _aberth(c, z0, max_iters)
        parts.append(z)
    raw = np.concatenate(parts)
    full = p.coeffs
    centers, mults = _cluster(raw, cluster_eps, _inclusion_radii(full, raw))
    centers = np.array([_polish(full, z) if m == 1 else z for z, m in zip(centers, mults)],
                       dtype=complex)
    resid = np.abs(evaluate(p, centers)) if centers.size else np.zeros(0)
    order = np.lexsort((centers.imag, centers.real))
    rs = RootSet(centers[order], mults[order], np.atleast_1d(resid)[order], it, raw)
    if not converged:
        raise RootFindingError(
            f"Aberth iteration did not converge in {max_iters} iterations "
            f"(max residual {float(np.max(rs.residuals)):.3g})", rs)
    return rs


def residual_ok(p: Poly, rs: RootSet, tol: float = ROOT_RESIDUAL_TOL) -> bool:
    """Residual check scaled by the coefficient magnitude at each root."""
    scale = p.scale() * np.maximum(1.0, np.abs(rs.roots)) ** p.degree
    return bool(np.all(rs.residuals <= tol * scale))
