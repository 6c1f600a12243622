"""Parameter values tau at which B(tau) acquires a multiple moving eigenvalue.

A moving eigenvalue is double exactly when p_{uv,tau} and its lambda
derivative share a root, so the candidates are the roots of
G(tau) = det S(p_{uv,tau}, p'_{uv,tau}).  Triple eigenvalues are excluded
by the resultant of two auxiliary polynomials f and g built from m, p_uv and
s = gcd(m, m').
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import comb

from .errors import ConditioningError, DegenerateError
from .jordan import gcd_m_dm
from .perturbation import PerturbationSystem, p_uv_tau
from .poly import (
    Poly,
    derivative,
    exact_divide,
    find_roots,
    resultant,
    sylvester_matrix,
)

__all__ = [
    "Collision",
    "CollisionReport",
    "f_g_polynomials",
    "triple_check",
    "G_polynomial",
    "find_collisions",
    "real_collision_scan",
    "closest_pair",
    "TRIPLE_TOL",
    "REAL_EPS",
]

TRIPLE_TOL = 1e-8
REAL_EPS = 1e-8
BORDERLINE_EPS = 1e-5
SIGMA_EPS = 1e-6
DEGREE_TOL = 1e-8
HOLDOUT_TOL = 1e-6


def f_g_polynomials(sys: PerturbationSystem) -> tuple[Poly, Poly, Poly]:
    """(f, g, s) with f = (m'/s) p - (m/s) p' and g = m'' p - m p''.

    s = prod (lambda - lambda_j)^{n_{j,1} - 1} is assembled from the Jordan
    structure, so both divisions are exact up to rounding.
    """
    m, p = sys.m, sys.p_uv
    s = gcd_m_dm(sys.spec)
    dm = derivative(m)
    try:
        m_s = exact_divide(m, s)
        dm_s = exact_divide(dm, s)
    except ArithmeticError as err:
        raise ConditioningError(f"m or m' not divisible by gcd(m, m'): {err}") from err
    dp = derivative(p)
    f = dm_s * p - m_s * dp
    g = derivative(dm) * p - m * derivative(dp)
    return f, g, s


def triple_check(sys: PerturbationSystem, tol: float = TRIPLE_TOL):
    """(certificate, triples_excluded, scale).

    ``certificate`` is Res(f, g).  A value above ``tol * scale``, with scale
    the product of the coefficient 2-norms of f and g, rules out any tau
    giving a moving eigenvalue of multiplicity three or more.
    """
    f, g, _ = f_g_polynomials(sys)
    if f.is_zero() or g.is_zero():
        raise DegenerateError("f or g vanishes identically; triple check undefined")
    cert = resultant(f, g)
    scale = f.norm() * g.norm()
    return cert, bool(abs(cert) > tol * scale), scale


def _discriminant_at(sys: PerturbationSystem, tau: complex) -> complex:
    p = p_uv_tau(sys, tau)
    return complex(np.linalg.det(sylvester_matrix(p, derivative(p))))


def _sample_radius(sys: PerturbationSystem) -> float:
    # m and tau p_uv balance where |tau| ~ ||m|| / ||p_uv||.
    pn = sys.p_uv.norm()
    return max(1.0, sys.m.norm() / pn) if pn > 0 else 1.0


def G_polynomial(sys: PerturbationSystem) -> Poly:
    """G(tau) = det S(p_{uv,tau}, p'_{uv,tau}) by evaluation and interpolation.

    G is sampled at 2l scaled roots of unity, enough to see a spurious
    degree 2l - 1 term, and the coefficients are recovered by an inverse
    DFT.  Anything above degree 2l - 2 must vanish, and one extra sample
    off the interpolation grid must agree with the interpolant; otherwise
    :class:`ConditioningError` is raised.
    """
    l = sys.l
    if l < 1:
        raise DegenerateError("A must have at least one eigenvalue")
    if l == 1:
        # p_{uv,tau} is linear: S(p, p') is the 1x1 matrix [1].
        return Poly([1.0])
    N = 2 * l
    r = _sample_radius(sys)
    w = np.exp(2j * np.pi * np.arange(N) / N)
    vals = np.array([_discriminant_at(sys, r * wk) for wk in w])
    scaled = np.fft.fft(vals) / N  # coefficient k times r^k
    big = np.abs(scaled).max()
    if big == 0:
        return Poly()
    top = np.abs(scaled[2 * l - 1:]).max()
    if top > DEGREE_TOL * big:
        raise ConditioningError(
            f"interpolated G has relative weight {top / big:.3g} above degree 2l-2")
    scaled = scaled[: 2 * l - 1]
    coeffs = scaled / r ** np.arange(scaled.size)
    G = Poly(coeffs)
    t_hold = 0.7 * r * np.exp(1j * np.pi / N)
    ref = _discriminant_at(sys, t_hold)
    got = complex(np.polyval(scaled[::-1], 0.7 * np.exp(1j * np.pi / N)))
    if abs(ref - got) > HOLDOUT_TOL * big:
        raise ConditioningError(
            f"G interpolation mismatch at held-out tau: |{ref} - {got}| vs scale {big:.3g}")
    return G


def closest_pair(z: np.ndarray):
    """(gap, midpoint) of the two closest entries of ``z``."""
    if z.size < 2:
        return np.inf, complex(z[0]) if z.size else 0j
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices_from(d)] = np.inf
    i, k = np.unravel_index(np.argmin(d), d.shape)
    return float(d[i, k]), complex(0.5 * (z[i] + z[k]))


@dataclass(frozen=True)
class Collision:
    tau: complex
    lambda0: complex
    real: bool
    on_sigma_A: bool
    multiplicity: int  # cluster size of p_{uv,tau} at lambda0
    tau_multiplicity: int  # multiplicity of tau as a root of G
    gap: float  # closest-pair distance among raw roots of p_{uv,tau}
    residual: float  # |G(tau)| relative to the coefficient scale
    borderline: bool = False

    def as_dict(self) -> dict:
        return {"tau": self.tau, "lambda0": self.lambda0, "real": self.real,
                "on_sigma_A": self.on_sigma_A}


@dataclass(frozen=True, eq=False)
class CollisionReport:
    G: Poly
    collisions: list
    triple_certificate: complex
    triples_excluded: bool
    triple_scale: float
    generic_degree: bool
    borderline: list = field(default_factory=list)

    @property
    def collision_taus(self) -> list[complex]:
        return [c.tau for c in self.collisions]

    @property
    def off_spectrum(self) -> list[Collision]:
        return [c for c in self.collisions if not c.on_sigma_A]

    def as_dict(self) -> dict:
        return {
            "G": list(self.G.coeffs),
            "collisions": [c.as_dict() for c in self.collisions],
            "triple_certificate": self.triple_certificate,
            "triples_excluded": self.triples_excluded,
        }


def _near_sigma(sys: PerturbationSystem, lam: complex) -> bool:
    return any(abs(lam - mu) <= SIGMA_EPS for mu in sys.eigenvalues)


def _polish_multiple(sys: PerturbationSystem, tau: complex, lam: complex, order: int,
                     steps: int = 12):
    """Gauss-Newton on m^(i)(lam) - tau p^(i)(lam) = 0 for i = 0..order.

    A tau that is an ``order``-fold root of G typically hosts a moving
    eigenvalue of multiplicity ``order + 1``; the stacked system is then
    overdetermined but of full column rank (p(lam) != 0), so the iteration
    converges quadratically where the root of G itself is ill-conditioned.
    """
    dm, dp = [sys.m], [sys.p_uv]
    for _ in range(order + 1):
        dm.append(derivative(dm[-1]))
        dp.append(derivative(dp[-1]))

    def resid(t, z):
        return np.array([dm[i](z) - t * dp[i](z) for i in range(order + 1)])

    best = (tau, lam)
    best_r = np.abs(resid(tau, lam)).max()
    for _ in range(steps):
        t, z = best
        J = np.array([[dm[i + 1](z) - t * dp[i + 1](z), -dp[i](z)] for i in range(order + 1)])
        step = np.linalg.lstsq(J, -resid(t, z), rcond=None)[0]
        cand = (t + step[1], z + step[0])
        r = np.abs(resid(*cand)).max()
        if not r < best_r:
            break
        best, best_r = cand, r
    return complex(best[0]), complex(best[1])


def vanishing_order(sys: PerturbationSystem, tau: complex, z: complex, tol: float = 1e-8) -> int:
    """Multiplicity of ``z`` as a root of p_{uv,tau}: the number of leading
    Taylor coefficients at ``z`` that vanish relative to the rounding bound
    built from |m| + |tau| |p_uv| (not from their cancelled difference)."""
    P = p_uv_tau(sys, tau)
    mag = np.abs(sys.m.coeffs).copy()
    pc = np.abs(sys.p_uv.coeffs) * abs(tau)
    mag[: pc.size] += pc
    az = abs(z)
    q = P
    for i in range(P.degree + 1):
        k = np.arange(i, mag.size)
        bound = np.sum(mag[i:] * comb(k, i) * az ** (k - i))
        if abs(q(z)) > tol * bound:
            return i
        q = derivative(q) * (1.0 / (i + 1))
    return P.degree


def _strip_tau_zero(sys: PerturbationSystem, G: Poly):
    """Split off the factor tau^(l - r) that p_{uv,0} = m forces on G.

    Returns (H, k) with G ~ tau^k H, where k is the number of low-order
    coefficients that are numerically zero (at most l - r).
    """
    k_max = sum(n - 1 for n in sys.spec.largest)
    c = G.coeffs
    r = _sample_radius(sys)
    scaled = np.abs(c) * r ** np.arange(c.size)
    big = scaled.max(initial=0.0)
    k = 0
    while k < min(k_max, c.size - 1) and scaled[k] <= DEGREE_TOL * big:
        k += 1
    return Poly(c[k:]), k


def find_collisions(sys: PerturbationSystem, G: Poly | None = None) -> CollisionReport:
    """All tau in C where p_{uv,tau} has a multiple root, classified."""
    if G is None:
        G = G_polynomial(sys)
    cert, excluded, tscale = triple_check(sys)
    collisions: list[Collision] = []
    borderline: list[Collision] = []
    H, k0 = _strip_tau_zero(sys, G)
    if k0 > 0:
        for lam, n in zip(sys.eigenvalues, sys.spec.largest):
            if n >= 2:
                collisions.append(Collision(0j, complex(lam), True, True, n, k0, 0.0, 0.0))
    if H.degree >= 1:
        taus = find_roots(H)
        hscale = H.scale()
        for tau, tm, res in zip(taus.roots, taus.multiplicities, taus.residuals):
            tau = complex(tau)
            raw = find_roots(p_uv_tau(sys, tau)).raw
            _, mid = closest_pair(raw)
            near = raw[np.argsort(np.abs(raw - mid))[: tm + 1]]
            tau, lam0 = _polish_multiple(sys, tau, complex(near.mean()), int(tm))
            P = p_uv_tau(sys, tau)
            rs = find_roots(P)
            gap, _ = closest_pair(rs.raw)
            multi = [(complex(z), int(m)) for z, m in zip(rs.roots, rs.multiplicities) if m >= 2]
            if len(multi) < 2:
                # One multiple eigenvalue: the polished point is the better estimate.
                multi = [(lam0, max(2, vanishing_order(sys, tau, lam0)))]
            im = abs(tau.imag)
            real = im <= REAL_EPS * (1 + abs(tau))
            border = not real and im <= BORDERLINE_EPS * (1 + abs(tau))
            rel = float(res) / (hscale * max(1.0, abs(tau)) ** H.degree)
            for lam0, m in multi:
                col = Collision(complex(tau.real) if real else tau, complex(lam0), real,
                                _near_sigma(sys, complex(lam0)), int(m), int(tm), gap, rel, border)
                collisions.append(col)
                if border:
                    borderline.append(col)
    return CollisionReport(G, collisions, cert, excluded, tscale, sys.generic_degree, borderline)


def real_collision_scan(sys: PerturbationSystem, report: CollisionReport | None = None) -> list[float]:
    """Real tau with a double eigenvalue off sigma(A)."""
    if report is None:
        report = find_collisions(sys)
    return sorted({c.tau.real for c in report.collisions if c.real and not c.on_sigma_A})
