"""Eigenvalue curves over real tau and their small/large tau asymptotics."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateError, RootFindingError
from .perturbation import PerturbationSystem, p_uv_tau
from .poly import Poly, RootSet, evaluate, find_roots, from_roots, taylor_shift

__all__ = [
    "CurveBundle",
    "SmallTauModel",
    "LargeTauModel",
    "trace_curves",
    "small_tau_model",
    "predict_small_tau",
    "local_moving_roots",
    "small_tau_error",
    "fit_small_tau",
    "large_tau_model",
    "large_tau_check",
    "match",
]

REFINE_FACTOR = 0.25
MAX_REFINE_DEPTH = 6
SEP_EPS = 1e-2
SMALL_TAU_TOL = 1e-12


def match(prev: np.ndarray, new: np.ndarray):
    """Minimum-weight bijection ``new[perm[i]] <-> prev[i]``; returns (perm, max distance)."""
    cost = np.abs(prev[:, None] - new[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(prev), dtype=int)
    perm[rows] = cols
    return perm, float(cost[rows, cols].max(initial=0.0))


@dataclass(frozen=True, eq=False)
class CurveBundle:
    taus: np.ndarray
    branches: np.ndarray  # (l, len(taus)), branch b at grid index t
    matching_residuals: np.ndarray  # len(taus) - 1
    refined: int = 0  # bisection substeps used for labelling

    @property
    def n_branches(self) -> int:
        return self.branches.shape[0]


def _min_sep(z: np.ndarray) -> float:
    if z.size < 2:
        return np.inf
    d = np.abs(z[:, None] - z[None, :])
    d[np.diag_indices_from(d)] = np.inf
    return float(d.min())


def _moving_roots(sys: PerturbationSystem, tau: float, warm=None) -> np.ndarray:
    if tau == 0:
        lams = np.array(sys.eigenvalues, dtype=complex)
        return np.repeat(lams, sys.spec.largest)
    try:
        return find_roots(p_uv_tau(sys, tau), initial=warm).expanded()
    except RootFindingError as err:
        raise RootFindingError(f"root finding failed at tau={tau!r}: {err}", err.best) from err


def trace_curves(sys: PerturbationSystem, tau_min: float, tau_max: float, steps: int,
                 refine: bool = True, max_depth: int = MAX_REFINE_DEPTH) -> CurveBundle:
    """Moving eigenvalues on a uniform real tau grid, labelled into continuous branches.

    Consecutive root sets are paired by minimum-weight bipartite matching.
    Where some branch moves more than a quarter of the local minimum root
    separation, the step is bisected (up to ``max_depth`` times) and the
    labels are carried through the intermediate points; only grid points
    are reported.  A grid straddling zero always samples tau = 0 exactly.
    """
    if steps < 2 or not tau_min < tau_max:
        raise ValueError("need steps >= 2 and tau_min < tau_max")
    grid = np.linspace(tau_min, tau_max, steps)
    if tau_min < 0 < tau_max:
        k = int(np.argmin(np.abs(grid)))
        if abs(grid[k]) <= 1e-12 * (tau_max - tau_min):
            grid[k] = 0.0
        else:
            grid = np.sort(np.append(grid, 0.0))

    first = _moving_roots(sys, float(grid[0]))
    cols = [first[np.lexsort((first.imag, first.real))]]
    resid: list[float] = []
    refined = 0

    def advance(t_a, z_a, t_b, depth):
        # Returns (roots at t_b labelled like z_a, max matching distance).
        nonlocal refined
        z_b = _moving_roots(sys, t_b, warm=z_a)
        perm, dist = match(z_a, z_b)
        z_b = z_b[perm]
        local = max(_min_sep(z_a), _min_sep(z_b))
        if refine and depth < max_depth and dist > REFINE_FACTOR * local:
            t_mid = 0.5 * (t_a + t_b)
            if t_a < t_mid < t_b:
                refined += 1
                z_mid, d1 = advance(t_a, z_a, t_mid, depth + 1)
                z_end, d2 = advance(t_mid, z_mid, t_b, depth + 1)
                return z_end, max(d1, d2)
        return z_b, dist

    for t_a, t_b in zip(grid[:-1], grid[1:]):
        z, dist = advance(float(t_a), cols[-1], float(t_b), 0)
        cols.append(z)
        resid.append(dist)
    return CurveBundle(grid, np.array(cols).T, np.array(resid), refined)


# -- small tau ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SmallTauModel:
    eigenvalues: list
    exponents: list  # n_{j,1}
    coefficients: list  # c_j, or None where p_uv(lambda_j) vanishes


def small_tau_model(sys: PerturbationSystem, tol: float = SMALL_TAU_TOL) -> SmallTauModel:
    """Leading-order coefficients c_j in (mu - lambda_j)^{n_{j,1}} ~ tau c_j.

    Matching leading orders in m(mu) = tau p_uv(mu) near lambda_j gives
    c_j = p_uv(lambda_j) / prod_{j' != j} (lambda_j - lambda_j')^{n_{j',1}}.
    """
    lams = sys.eigenvalues
    exps = sys.spec.largest
    scale = max(sys.p_uv.scale(), 1e-300)
    coeffs = []
    for j, lam in enumerate(lams):
        val = evaluate(sys.p_uv, lam)
        if abs(val) <= tol * scale:
            coeffs.append(None)
            continue
        denom = 1.0 + 0j
        for jj, lam2 in enumerate(lams):
            if jj != j:
                denom *= (lam - lam2) ** exps[jj]
        coeffs.append(val / denom)
    return SmallTauModel(list(lams), list(exps), coeffs)


def _offset(model: SmallTauModel, j: int, k: int, tau: complex) -> complex:
    c = model.coefficients[j]
    if c is None:
        raise DegenerateError(f"small-tau model undefined at eigenvalue {model.eigenvalues[j]}")
    n = model.exponents[j]
    if not 0 <= k < n:
        raise ValueError(f"k must lie in [0, {n})")
    if tau == 0:
        return 0j
    return (complex(tau) * c) ** (1.0 / n) * cmath.exp(-2j * cmath.pi * k / n)


def predict_small_tau(model: SmallTauModel, j: int, k: int, tau: complex) -> complex:
    """lambda_j + (tau c_j)^{1/n} exp(-2 pi i k / n), principal root."""
    return model.eigenvalues[j] + _offset(model, j, k, tau)


def _local_p_uv_tau(sys: PerturbationSystem, j: int, tau: complex) -> Poly:
    # m(lam_j + z) is built from its shifted roots so the z^0..z^{n-1}
    # coefficients are exact zeros; only p_uv is Taylor-shifted.
    lams = sys.eigenvalues
    lam = lams[j]
    roots: list[complex] = []
    for jj, (lam2, k) in enumerate(zip(lams, sys.spec.largest)):
        roots.extend([0.0 if jj == j else lam2 - lam] * k)
    return from_roots(roots) - taylor_shift(sys.p_uv, lam) * complex(tau)


def local_moving_roots(sys: PerturbationSystem, j: int, tau: complex) -> np.ndarray:
    """The n_{j,1} moving eigenvalues closest to lambda_j, as offsets mu - lambda_j.

    Computed in the local variable z = mu - lambda_j so offsets far below
    |lambda_j| keep full relative accuracy.
    """
    z = find_roots(_local_p_uv_tau(sys, j, tau)).expanded()
    n = sys.spec.largest[j]
    return z[np.argsort(np.abs(z))[:n]]


def small_tau_error(sys: PerturbationSystem, model: SmallTauModel, j: int, tau: complex) -> float:
    """max_k |mu_{j,k}(tau) - prediction| after optimal matching."""
    n = model.exponents[j]
    pred = np.array([_offset(model, j, k, tau) for k in range(n)])
    got = local_moving_roots(sys, j, tau)
    perm, _ = match(pred, got)
    return float(np.abs(got[perm] - pred).max())


def fit_small_tau(sys: PerturbationSystem, j: int, taus=(1e-6, 1e-8)) -> dict:
    """Log-log fit of |mu - lambda_j| against tau from computed roots only.

    Expected: slope 1/n_{j,1} and |c_j| = exp(n_{j,1} * intercept).
    """
    n = sys.spec.largest[j]
    logt = np.log(np.abs(np.asarray(taus, dtype=float)))
    logd = np.array([np.mean(np.log(np.abs(local_moving_roots(sys, j, t)))) for t in taus])
    slope, intercept = np.polyfit(logt, logd, 1) if len(taus) > 1 else (1.0 / n, logd[0] - logt[0] / n)
    return {"slope": float(slope), "intercept": float(intercept),
            "abs_c": float(np.exp(n * intercept)), "expected_slope": 1.0 / n}


# -- large tau ---------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LargeTauModel:
    finite_limits: RootSet
    ray_slope: complex
    tau0_estimate: float


def _limits(sys: PerturbationSystem) -> RootSet:
    if sys.p_uv.degree >= 1:
        return find_roots(sys.p_uv)
    empty = np.zeros(0, dtype=complex)
    return RootSet(empty, np.zeros(0, dtype=int), np.zeros(0))


def large_tau_check(sys: PerturbationSystem, limits: np.ndarray, tau: complex):
    """Match moving roots at ``tau`` to ``limits``.

    Returns ``(max distance to limits, escaping root)``.
    """
    roots = _moving_roots(sys, tau)
    if limits.size == 0:
        return 0.0, roots[np.argmax(np.abs(roots))]
    cost = np.abs(limits[:, None] - roots[None, :])
    rows, cols = linear_sum_assignment(cost)
    rest = np.setdiff1d(np.arange(roots.size), cols)
    return float(cost[rows, cols].max()), roots[rest[0]]


def _tau0(sys: PerturbationSystem, limits: np.ndarray, sep_eps: float) -> float:
    mags = np.logspace(-3, 9, 49)
    dirs = np.exp(2j * np.pi * np.arange(8) / 8)
    worst = 0.0
    for t in mags:
        for d in dirs:
            try:
                dist, _ = large_tau_check(sys, limits, t * d)
            except RootFindingError:
                dist = np.inf
            if dist > sep_eps:
                worst = t
                break
    return 2.0 * worst


def large_tau_model(sys: PerturbationSystem, sep_eps: float = SEP_EPS,
                    estimate_tau0: bool = True) -> LargeTauModel:
    """Finite limits (roots of p_uv), the escaping ray slope v^T u and an
    empirical tau_0 beyond which every bounded root stays within
    ``sep_eps`` of its limit (sampled over 8 directions in the tau plane)."""
    if not sys.generic_degree:
        raise DegenerateError(
            f"deg p_uv = {sys.p_uv.degree} < l - 1 = {sys.l - 1}; large-tau model needs generic degree")
    slope = complex(sys.v @ sys.u)
    if slope == 0:
        raise DegenerateError("v^T u = 0: no escaping ray")
    limits = _limits(sys)
    tau0 = _tau0(sys, limits.expanded(), sep_eps) if estimate_tau0 else float("nan")
    return LargeTauModel(limits, slope, tau0)
