"""Filtered Floer-type complexes over Z/2[t, t^-1], window homology, and model Hamiltonian dynamics."""

from .complex import FilteredComplex, Generator, Window, action_of_chain, make_complex, validate, window_complex
from .laurent import ACTION_EPS, GradingParams, LaurentGF2, lp_add, lp_mul, monomial_action, monomial_degree
from .persistence import (
    barcode,
    death_action,
    exact_triangle,
    inclusion_map,
    shrink_window,
    t_shift,
    window_homology,
)

__all__ = [
    "ACTION_EPS", "FilteredComplex", "Generator", "GradingParams", "LaurentGF2", "Window",
    "action_of_chain", "barcode", "death_action", "exact_triangle", "inclusion_map", "lp_add", "lp_mul",
    "make_complex", "monomial_action", "monomial_degree", "shrink_window", "t_shift", "validate",
    "window_complex", "window_homology",
]
