"""Hypothesis strategies for random filtered complexes and off-spectrum windows.

Actions live on the grid 0.05 Z and a0 = 1, so every spectrum value is a
multiple of 0.05; window endpoints sit on 0.025 + 0.05 Z and never touch it.
"""

from __future__ import annotations

from hypothesis import strategies as st

from lagcap.complex import FilteredComplex, Generator, make_complex
from lagcap.laurent import GradingParams, LaurentGF2

STEP = 0.05
PARAMS = GradingParams(2, 0.5)


def _act(k: int) -> float:
    return round(k * STEP, 10)


@st.composite
def paired_complexes(draw, max_pairs: int = 3, max_free: int = 2) -> FilteredComplex:
    """Disjoint pairs dx = y t^r obeying the grading and action rules, plus free cycles."""
    gens: list[Generator] = []
    terms: dict[str, list[tuple[str, int]]] = {}
    for i in range(draw(st.integers(0, max_pairs))):
        d = draw(st.integers(0, 3))
        ax = draw(st.integers(0, 19))
        r = draw(st.integers(-1, 1))
        drop = draw(st.integers(0 if r == 0 else 1, 8))
        # |y| - r N_L = |x| - 1 and A(y) - r a0 = A(x) - drop * STEP
        ay = ax - drop + r * 20
        gens += [Generator(f"x{i}", d, _act(ax)), Generator(f"y{i}", d - 1 + r * PARAMS.N_L, _act(ay))]
        terms[f"x{i}"] = [(f"y{i}", r)]
    for j in range(draw(st.integers(0 if gens else 1, max_free))):
        gens.append(Generator(f"z{j}", draw(st.integers(-1, 3)), _act(draw(st.integers(0, 19)))))
    return make_complex(PARAMS, gens, terms, "random")


def basis_change(cx: FilteredComplex, i: str, j: str, s: int) -> FilteredComplex:
    """Conjugate d by P: e_i -> e_i + e_j t^s (P = P^-1 over Z/2 for i != j)."""
    ids = cx.ids
    D = {(y, x): coeff for x, row in cx.diff.items() for y, coeff in row.items()}
    zero = LaurentGF2.zero()
    P = {(k, k): LaurentGF2.one() for k in ids}
    P[(j, i)] = LaurentGF2.monomial(s)

    def mul(A, B):
        out = {}
        for (r, k), u in A.items():
            for (k2, c), v in B.items():
                if k == k2:
                    out[(r, c)] = out.get((r, c), zero) + u * v
        return {key: v for key, v in out.items() if v}

    new = mul(mul(P, D), P)
    diff: dict[str, dict[str, LaurentGF2]] = {}
    for (y, x), coeff in new.items():
        diff.setdefault(x, {})[y] = coeff
    return FilteredComplex(cx.params, cx.generators, diff, cx.name + "'")


@st.composite
def filtered_basis_changes(draw, cx: FilteredComplex, max_moves: int = 3) -> FilteredComplex:
    """Random products of elementary filtered basis changes (strict action drop)."""
    a0, N = cx.params.a0, cx.params.N_L
    for _ in range(draw(st.integers(0, max_moves))):
        moves = []
        for gi in cx.generators:
            for gj in cx.generators:
                if gi.id == gj.id or (gj.degree - gi.degree) % N:
                    continue
                s = (gj.degree - gi.degree) // N
                if gj.action - s * a0 < gi.action - 1e-9:
                    moves.append((gi.id, gj.id, s))
        if not moves:
            break
        i, j, s = draw(st.sampled_from(moves))
        cx = basis_change(cx, i, j, s)
    return cx


def off_spectrum(k: int) -> float:
    return round(0.025 + k * STEP, 10)


@st.composite
def windows(draw, lo: int = -40, hi: int = 40) -> tuple[float, float]:
    i = draw(st.integers(lo, hi))
    j = draw(st.integers(i + 1, i + 30))
    return off_spectrum(i), off_spectrum(j)


@st.composite
def cut_triples(draw, lo: int = -40, hi: int = 40) -> tuple[float, float, float]:
    i = draw(st.integers(lo, hi))
    j = draw(st.integers(i + 1, i + 25))
    k = draw(st.integers(j + 1, j + 25))
    return off_spectrum(i), off_spectrum(j), off_spectrum(k)


laurent = st.frozensets(st.integers(-6, 6), max_size=6).map(lambda s: LaurentGF2(tuple(sorted(s))))
