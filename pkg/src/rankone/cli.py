"""Command-line front end.

    rankone factor problem.json --tau 1
    rankone trace problem.json --tau-min -5 --tau-max 5 --steps 2001 --out curves.csv --svg curves.svg
    rankone collisions problem.json --out collisions.json
    rankone asymptotics problem.json
    rankone structure problem.json --tau 1
    rankone genericity template.json --trials 1000 --seed 0

Exit status: 0 on success, 2 for malformed input, 3 for numerical failure.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import collision as col
from .asymptotics import (
    fit_small_tau,
    large_tau_model,
    small_tau_error,
    small_tau_model,
    trace_curves,
)
from .errors import ConditioningError, DegenerateError, RootFindingError
from .perturbation import (
    OVERLAP_EPS,
    ORACLE_N_MAX,
    char_poly_B,
    oracle_char_poly,
    p_uv_tau,
    spectrum,
    verify_structure_at_A,
)
from .poly import find_roots
from .serialize import ProblemError, curves_csv, dumps, load_problem, random_vectors
from .svg import curves_svg

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_NUMERIC = 3

DISTRIBUTION = "standard complex Gaussian (re, im ~ N(0, 1/2))"
SMALL_TAUS = (1e-6, 1e-8)


def _tau(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError as err:
        raise argparse.ArgumentTypeError(f"not a complex number: {text!r}") from err


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _discrepancy(a, b) -> float:
    """Max coefficient difference relative to the larger coefficient scale."""
    n = max(a.coeffs.size, b.coeffs.size)
    ca = np.zeros(n, dtype=complex)
    cb = np.zeros(n, dtype=complex)
    ca[: a.coeffs.size] = a.coeffs
    cb[: b.coeffs.size] = b.coeffs
    scale = max(a.scale(), b.scale(), 1e-300)
    return float(np.abs(ca - cb).max(initial=0.0) / scale)


# -- commands ---------------------------------------------------------------

def cmd_factor(problem, tau: complex) -> dict:
    sys_ = problem.system()
    char = char_poly_B(sys_, tau)
    doc = {
        "tau": tau,
        "n": sys_.n,
        "l": sys_.l,
        "m": sys_.m,
        "q": sys_.q,
        "p_uv": sys_.p_uv,
        "p_uv_tau": p_uv_tau(sys_, tau),
        "char_poly": char,
    }
    if sys_.n <= ORACLE_N_MAX:
        oracle = oracle_char_poly(sys_.B(tau))
        doc["oracle_char_poly"] = oracle
        doc["discrepancy"] = _discrepancy(char, oracle)
    else:
        doc["oracle_char_poly"] = None
        doc["discrepancy"] = None
    return doc


def cmd_trace(problem, tau_min: float, tau_max: float, steps: int):
    sys_ = problem.system()
    bundle = trace_curves(sys_, tau_min, tau_max, steps)
    limits, slope = [], None
    if sys_.p_uv.degree >= 1:
        limits = list(find_roots(sys_.p_uv).expanded())
    vu = complex(sys_.v @ sys_.u)
    if vu != 0:
        slope = vu
    svg = curves_svg(bundle, limits, slope, title="eigenvalues of A + tau u v^T")
    return bundle, curves_csv(bundle), svg


def cmd_collisions(problem) -> tuple[dict, list[str]]:
    sys_ = problem.system()
    warnings = []
    if not sys_.generic_degree:
        warnings.append(f"degenerate input: deg p_uv = {sys_.p_uv.degree} < l - 1 = {sys_.l - 1}")
    rep = col.find_collisions(sys_)
    if rep.borderline:
        warnings.append(f"{len(rep.borderline)} collision(s) with nearly real tau")
    return rep.as_dict(), warnings


def cmd_asymptotics(problem) -> dict:
    sys_ = problem.system()
    model = small_tau_model(sys_)
    small = []
    for j, (lam, n, c) in enumerate(zip(model.eigenvalues, model.exponents, model.coefficients)):
        entry = {"eigenvalue": lam, "exponent": n, "c": c}
        if c is None:
            entry["error"] = "p_uv vanishes at this eigenvalue; model undefined"
        else:
            fit = fit_small_tau(sys_, j, SMALL_TAUS)
            entry["fit"] = {
                "taus": list(SMALL_TAUS),
                "slope": fit["slope"],
                "expected_slope": fit["expected_slope"],
                "abs_c": fit["abs_c"],
                "slope_residual": abs(fit["slope"] - fit["expected_slope"]),
                "abs_c_relative_residual": abs(fit["abs_c"] - abs(c)) / abs(c),
            }
            entry["prediction_error"] = [
                {"tau": t, "error": small_tau_error(sys_, model, j, t),
                 "error_over_tau_2_over_n": small_tau_error(sys_, model, j, t) / t ** (2 / n)}
                for t in SMALL_TAUS]
        small.append(entry)
    try:
        big = large_tau_model(sys_)
        large = {"finite_limits": list(big.finite_limits.expanded()), "ray_slope": big.ray_slope,
                 "tau0_estimate": big.tau0_estimate}
    except DegenerateError as err:
        large = {"error": str(err)}
    return {"small_tau": small, "large_tau": large}


def cmd_structure(problem, tau: complex) -> dict:
    sys_ = problem.system()
    rep = verify_structure_at_A(sys_, tau)
    return {
        "tau": tau,
        "blocks": [{"eigenvalue": lam, "observed": obs, "expected": exp}
                   for (lam, obs), (_, exp) in zip(rep.blocks, rep.expected)],
        "moving": [{"eigenvalue": mu, "rank": r} for mu, r in zip(rep.moving, rep.moving_ranks)],
        "survives": rep.survives,
        "nonderogatory": rep.nonderogatory,
    }


def genericity_trial(problem, rng) -> dict:
    """Evaluate each genericity claim for one random (u, v)."""
    u, v = random_vectors(rng, problem.n)
    sys_ = problem.system(u, v)
    out = {"generic_degree": sys_.generic_degree}
    sp = spectrum(sys_, 1.0)
    moving = sp.moving_part
    simple = bool(np.all(moving.multiplicities == 1)) and not sp.overlap
    out["simple_off_spectrum"] = simple
    rep = verify_structure_at_A(sys_, 1.0)
    out["jordan_survival"] = rep.survives
    try:
        report = col.find_collisions(sys_)
        out["real_collision_empty"] = not col.real_collision_scan(sys_, report)
    except (RootFindingError, ConditioningError, DegenerateError):
        out["real_collision_empty"] = False
    # Only the largest block at each eigenvalue is destroyed, and what it
    # releases moves as l simple eigenvalues away from sigma(A).
    out["largest_block_destroyed"] = bool(rep.survives and rep.nonderogatory and simple
                                  and moving.count == sys_.l
                                  and all(abs(z - lam) > OVERLAP_EPS
                                          for z in moving.roots for lam in sys_.eigenvalues))
    return out


CLAIMS = ("generic_degree", "simple_off_spectrum", "jordan_survival",
          "real_collision_empty", "largest_block_destroyed")


def cmd_genericity(problem, trials: int, seed: int) -> dict:
    counts = dict.fromkeys(CLAIMS, 0)
    failures = 0
    for i in range(trials):
        rng = np.random.default_rng(seed + i)
        try:
            res = genericity_trial(problem, rng)
        except (RootFindingError, ConditioningError):
            failures += 1
            continue
        for k in CLAIMS:
            counts[k] += int(res[k])
    return {"matrix": problem.matrix_json(), "trials": trials, "seed": seed,
            "distribution": DISTRIBUTION, "tau": 1.0, "counts": counts,
            "numerical_failures": failures}


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="rankone",
                                 description="Spectral analysis of B(tau) = A + tau u v^T.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("problem", help="problem JSON file")
        p.add_argument("--out", help="output file (default: stdout)")
        return p

    p = add("factor", "factor the characteristic polynomial at one tau")
    p.add_argument("--tau", type=_tau, default=1.0)
    p = add("trace", "trace eigenvalue curves over a real tau interval (CSV)")
    p.add_argument("--tau-min", type=float, default=-5.0)
    p.add_argument("--tau-max", type=float, default=5.0)
    p.add_argument("--steps", type=int, default=1001)
    p.add_argument("--svg", help="also write an SVG plot here")
    add("collisions", "tau values with a double moving eigenvalue")
    add("asymptotics", "small- and large-tau models")
    p = add("structure", "Jordan structure of B(tau) at the eigenvalues of A")
    p.add_argument("--tau", type=_tau, default=1.0)
    p = add("genericity", "Monte-Carlo check of the genericity claims")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return ap


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem = load_problem(args.problem, require_vectors=args.command != "genericity")
        if args.command == "factor":
            _write(dumps(cmd_factor(problem, args.tau)), args.out)
        elif args.command == "trace":
            if args.steps < 2 or not args.tau_min < args.tau_max:
                raise ProblemError("need --steps >= 2 and --tau-min < --tau-max")
            _, csv, svg = cmd_trace(problem, args.tau_min, args.tau_max, args.steps)
            _write(csv, args.out)
            if args.svg:
                _write(svg, args.svg)
        elif args.command == "collisions":
            doc, warnings = cmd_collisions(problem)
            for w in warnings:
                print(f"rankone: warning: {w}", file=sys.stderr)
            _write(dumps(doc), args.out)
        elif args.command == "asymptotics":
            _write(dumps(cmd_asymptotics(problem)), args.out)
        elif args.command == "structure":
            if args.tau == 0:
                raise ProblemError("--tau must be nonzero")
            _write(dumps(cmd_structure(problem, args.tau)), args.out)
        elif args.command == "genericity":
            if args.trials < 1 or args.seed < 0:
                raise ProblemError("need --trials >= 1 and --seed >= 0")
            _write(dumps(cmd_genericity(problem, args.trials, args.seed)), args.out)
    except (ProblemError, OSError) as err:
        print(f"rankone: error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except (RootFindingError, ConditioningError, DegenerateError, ArithmeticError) as err:
        print(f"rankone: numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as err:
        print(f"rankone: error: {err}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
