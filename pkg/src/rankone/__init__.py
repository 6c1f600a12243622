"""Spectral analysis of rank-one perturbations B(tau) = A + tau u v^T."""

from .asymptotics import large_tau_model, small_tau_model, trace_curves
from .collision import G_polynomial, find_collisions, triple_check
from .errors import ConditioningError, DegenerateError, RootFindingError
from .jordan import JordanSpec, build_matrix
from .perturbation import PerturbationSystem, char_poly_B, oracle_char_poly, spectrum, verify_structure_at_A
from .poly import Poly, find_roots

__all__ = [
    "ConditioningError",
    "DegenerateError",
    "G_polynomial",
    "JordanSpec",
    "PerturbationSystem",
    "Poly",
    "RootFindingError",
    "build_matrix",
    "char_poly_B",
    "find_collisions",
    "find_roots",
    "large_tau_model",
    "oracle_char_poly",
    "small_tau_model",
    "spectrum",
    "trace_curves",
    "triple_check",
    "verify_structure_at_A",
]
