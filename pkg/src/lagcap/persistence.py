"""Window homology HF^(a,b) and the maps between windows.

Everything is exact matrix reduction over Z/2 on the finite quotient complexes
produced by :func:`lagcap.complex.window_complex`.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from . import gf2
from .complex import (
    NEG_INF,
    FilteredComplex,
    Monomial,
    QuotientComplexView,
    Window,
    format_chain,
    window_complex,
)
from .errors import NotACycle, NotComparable, NotExact, ShiftExceeded, SpectrumInCollar
from .laurent import ACTION_EPS

INF = float("inf")


@dataclass
class WindowHomology:
    view: QuotientComplexView
    reduction: gf2.Reduction
    basis: list[tuple[int, int]]  # (degree, column of the essential cycle)
    representatives: list[frozenset]

    @property
    def cx(self) -> FilteredComplex:
        return self.view.cx

    @property
    def window(self) -> Window:
        return self.view.window

    @property
    def ranks(self) -> dict[int, int]:
        return dict(sorted(Counter(d for d, _ in self.basis).items()))

    @property
    def degrees(self) -> list[int]:
        return [d for d, _ in self.basis]

    @property
    def dim(self) -> int:
        return len(self.basis)

    def is_point(self, degree: int) -> bool:
        """True iff the homology is Z/2 concentrated in ``degree``."""
        return self.ranks == {degree: 1}

    def to_bits(self, chain: Iterable[Monomial]) -> int:
        idx = self.view.index
        v = 0
        for m in chain:
            v ^= 1 << idx[m]
        return v

    def project(self, chain: Iterable[Monomial], strict: bool = True) -> frozenset:
        """Image of a chain of CF^{<b} in the quotient: drop monomials with action <= a."""
        w = self.window
        out = set()
        for m in chain:
            act = self.cx.action(m)
            if act <= w.a:
                continue
            if act >= w.b:
                if strict:
                    raise ShiftExceeded(
                        f"monomial {format_chain([m])} with action {act:g} is outside CF^{{<{w.b:g}}}")
                continue
            out ^= {m}
        return frozenset(out)

    def coordinates(self, chain: Iterable[Monomial]) -> np.ndarray:
        """Coordinates of the class of a cycle in the chosen basis."""
        red = self.reduction
        pos = {col: i for i, (_, col) in enumerate(self.basis)}
        z = self.to_bits(chain)
        coords = np.zeros(self.dim, dtype=np.uint8)
        while z:
            lw = gf2.low(z)
            k = red.pivot_of_low.get(lw)
            if k is not None:
                z ^= red.R[k]
            elif lw in pos:
                z ^= red.V[lw]
                coords[pos[lw]] ^= 1
            else:
                raise NotACycle(f"chain {format_chain(chain, self.cx)} is not a cycle in window {self.window}")
        return coords

    def is_boundary(self, chain: Iterable[Monomial]) -> bool:
        return not self.coordinates(chain).any()

    def lines(self) -> list[str]:
        out = [f"HF^{self.window} of {self.cx.name or 'complex'}: {len(self.view)} monomials in window"]
        if not self.basis:
            out.append("  0")
        for d, n in self.ranks.items():
            reps = [format_chain(r, self.cx) for (deg, _), r in zip(self.basis, self.representatives) if deg == d]
            out.append(f"  degree {d:>3}: rank {n}   [{'; '.join(reps)}]")
        return out

    def csv_rows(self) -> list[tuple]:
        return [(self.window.a, self.window.b, d, n) for d, n in self.ranks.items()]


def _homology_of_view(view: QuotientComplexView) -> WindowHomology:
    idx = view.index
    cols = []
    for m in view.monomials:
        v = 0
        for y in view.boundary[m]:
            v ^= 1 << idx[y]
        cols.append(v)
    red = gf2.reduce_columns(cols)
    degs = view.degrees()
    ess = red.essential()
    basis = sorted((degs[j], j) for j in ess)
    reps = [frozenset(view.monomials[i] for i in gf2.bits(red.V[j])) for _, j in basis]
    return WindowHomology(view, red, basis, reps)


def window_homology(cx: FilteredComplex, w: Window) -> WindowHomology:
    return _homology_of_view(window_complex(cx, w))


@dataclass
class HomologyMap:
    source: WindowHomology
    target: WindowHomology
    matrix: np.ndarray  # target.dim x source.dim over Z/2
    degree_shift: int = 0
    label: str = ""

    @property
    def rank(self) -> int:
        return gf2.matrix_rank(self.matrix)

    def is_zero(self) -> bool:
        return not self.matrix.any()

    def is_iso(self) -> bool:
        return gf2.is_invertible(self.matrix)

    def __matmul__(self, other: "HomologyMap") -> "HomologyMap":
        """self o other."""
        return HomologyMap(other.source, self.target, gf2.matmul(self.matrix, other.matrix),
                           self.degree_shift + other.degree_shift, f"{self.label}o{other.label}")

    def rank_into_degree(self, d: int) -> int:
        rows = [i for i, deg in enumerate(self.target.degrees) if deg == d]
        return gf2.matrix_rank(self.matrix[rows, :]) if rows else 0

    def rank_from_degree(self, d: int) -> int:
        cols = [j for j, deg in enumerate(self.source.degrees) if deg == d]
        return gf2.matrix_rank(self.matrix[:, cols]) if cols else 0

    def describe(self) -> str:
        kind = "zero" if self.is_zero() else ("iso" if self.is_iso() else f"rank {self.rank}")
        return f"{self.label or 'map'} HF^{self.source.window} -> HF^{self.target.window}: {kind}"


def induced_map(source: WindowHomology, target: WindowHomology,
                on_monomial: Callable[[Monomial], Iterable[Monomial]],
                degree_shift: int = 0, label: str = "") -> HomologyMap:
    """Map on homology induced by a filtered chain map given on monomials."""
    mat = np.zeros((target.dim, source.dim), dtype=np.uint8)
    for j, rep in enumerate(source.representatives):
        image: set = set()
        for m in rep:
            image ^= set(on_monomial(m))
        mat[:, j] = target.coordinates(target.project(image))
    return HomologyMap(source, target, mat, degree_shift, label)


def _identity(m):
    return (m,)


def inclusion_map(cx: FilteredComplex, w1: Window, w2: Window,
                  h1: WindowHomology | None = None, h2: WindowHomology | None = None) -> HomologyMap:
    """iota: HF^{w1} -> HF^{w2} for w1 <= w2 (a1 <= a2 and b1 <= b2)."""
    if not (w1.a <= w2.a and w1.b <= w2.b):
        raise NotComparable(f"{w1} is not <= {w2} in the window order")
    h1 = h1 or window_homology(cx, w1)
    h2 = h2 or window_homology(cx, w2)
    return induced_map(h1, h2, _identity, 0, "iota")


def connecting_map(cx: FilteredComplex, a: float, b: float, c: float,
                   h_bc: WindowHomology | None = None, h_ab: WindowHomology | None = None) -> HomologyMap:
    """delta: HF^(b,c) -> HF^(a,b)[-1], induced by the off-diagonal block of d on CF^(a,c)."""
    h_bc = h_bc or window_homology(cx, Window(b, c))
    h_ab = h_ab or window_homology(cx, Window(a, b))
    return induced_map(h_bc, h_ab, cx.boundary_of_monomial, -1, "delta")


@dataclass
class TriangleReport:
    cuts: tuple[float, float, float]
    groups: dict[str, dict[int, int]]
    maps: dict[str, HomologyMap]
    exact: dict[str, dict[int, bool]]  # node -> degree -> exact

    @property
    def ok(self) -> bool:
        return all(all(v.values()) for v in self.exact.values())

    def lines(self) -> list[str]:
        a, b, c = self.cuts
        out = [f"exact triangle at cuts {a:g} < {b:g} < {c:g}"]
        for name, ranks in self.groups.items():
            out.append(f"  HF^{name}: {ranks or 0}")
        for name, m in self.maps.items():
            out.append(f"  {name}: rank {m.rank}")
        for node, per_deg in self.exact.items():
            flag = all(per_deg.values())
            out.append(f"  exact at HF^{node}: {'yes' if flag else 'NO'}")
        return out


def _exact_at(incoming: HomologyMap, outgoing: HomologyMap, node: WindowHomology) -> dict[int, bool]:
    comp = gf2.matmul(outgoing.matrix, incoming.matrix)
    comp_zero = not comp.any()
    res = {}
    for d, n in node.ranks.items():
        res[d] = comp_zero and incoming.rank_into_degree(d) + outgoing.rank_from_degree(d) == n
    if not node.ranks:
        res = {}
    return res


def exact_triangle(cx: FilteredComplex, a: float, b: float, c: float, check: bool = True) -> TriangleReport:
    """HF^(a,b) -> HF^(a,c) -> HF^(b,c) -> HF^(a,b)[-1], with exactness at every node."""
    if not a < b < c:
        raise ValueError(f"need a < b < c, got {a}, {b}, {c}")
    h_ab = window_homology(cx, Window(a, b))
    h_ac = window_homology(cx, Window(a, c))
    h_bc = window_homology(cx, Window(b, c))
    i1 = inclusion_map(cx, h_ab.window, h_ac.window, h_ab, h_ac)
    i2 = inclusion_map(cx, h_ac.window, h_bc.window, h_ac, h_bc)
    delta = connecting_map(cx, a, b, c, h_bc, h_ab)
    names = (f"({a:g},{b:g})", f"({a:g},{c:g})", f"({b:g},{c:g})")
    exact = {
        names[1]: _exact_at(i1, i2, h_ac),
        names[2]: _exact_at(i2, delta, h_bc),
        names[0]: _exact_at(delta, i1, h_ab),
    }
    rep = TriangleReport((a, b, c), dict(zip(names, (h_ab.ranks, h_ac.ranks, h_bc.ranks))),
                         {"i1": i1, "i2": i2, "delta": delta}, exact)
    if check and not rep.ok:
        raise NotExact(f"triangle at cuts {(a, b, c)} fails exactness: {exact}")
    return rep


@dataclass
class IsomorphismReport:
    name: str
    source: dict[int, int]
    target: dict[int, int]
    is_iso: bool
    notes: list[str] = field(default_factory=list)

    def lines(self) -> list[str]:
        out = [f"{self.name}: {'isomorphism' if self.is_iso else 'NOT an isomorphism'}",
               f"  source ranks {self.source or 0}", f"  target ranks {self.target or 0}"]
        out += [f"  {n}" for n in self.notes]
        return out


def t_shift_map(cx: FilteredComplex, w: Window, k: int = 1) -> HomologyMap:
    """Multiplication by t^k: HF^(a,b) -> HF^(a - k a0, b - k a0), degree shift -k N_L."""
    a0 = cx.params.a0
    src = window_homology(cx, w)
    tgt = window_homology(cx, w.shifted(-k * a0))
    return induced_map(src, tgt, lambda m: ((m[0], m[1] + k),), -k * cx.params.N_L, f"t^{k}")


def t_shift(cx: FilteredComplex, w: Window) -> IsomorphismReport:
    m = t_shift_map(cx, w)
    notes = []
    shifted = sorted((g, r + 1) for g, r in m.source.view.monomials)
    bijective = shifted == sorted(m.target.view.monomials)
    notes.append(f"monomial bijection: {'yes' if bijective else 'no'}")
    graded = all(m.target.degrees[i] == m.source.degrees[j] - cx.params.N_L
                 for i, j in zip(*np.nonzero(m.matrix)))
    notes.append(f"degree shift {m.degree_shift}: {'yes' if graded else 'no'}")
    ok = bijective and graded and m.is_iso()
    return IsomorphismReport(f"t: HF^{w} -> HF^{m.target.window}", m.source.ranks, m.target.ranks, ok, notes)


def shrink_window(cx: FilteredComplex, a: float, a2: float, b2: float, b: float) -> IsomorphismReport:
    """HF^(a,b) ~ HF^(a',b') when [a,a'] and [b',b] miss the spectrum."""
    if not (a <= a2 < b2 <= b):
        raise ValueError(f"need a <= a' < b' <= b, got {a}, {a2}, {b2}, {b}")
    spec = cx.spectrum()
    for lo, hi in ((a, a2), (b2, b)):
        hits = spec.points_in(lo, hi)
        if hits:
            raise SpectrumInCollar(f"collar [{lo:g}, {hi:g}] meets the spectrum at {hits[0]:g}")
    outer = Window(a, b)
    inner = Window(a2, b2)
    mid = Window(a2, b)
    f = inclusion_map(cx, outer, mid)
    g = inclusion_map(cx, inner, mid)
    ok = f.is_iso() and g.is_iso()
    notes = [f"HF^{outer} -> HF^{mid}: {'iso' if f.is_iso() else 'not iso'}",
             f"HF^{inner} -> HF^{mid}: {'iso' if g.is_iso() else 'not iso'}"]
    return IsomorphismReport(f"HF^{outer} ~ HF^{inner}", f.source.ranks, g.source.ranks, ok, notes)


# -- barcode ------------------------------------------------------------------

@dataclass(frozen=True)
class Bar:
    birth: float
    death: float
    degree: int
    representative: frozenset

    def shifted(self, k: int, a0: float, N_L: int) -> "Bar":
        return Bar(self.birth - k * a0, self.death - k * a0, self.degree - k * N_L,
                   frozenset((g, r + k) for g, r in self.representative))


@dataclass
class Barcode:
    bars: list[Bar]
    a0: float
    N_L: int
    domain: tuple[float, float]

    def lines(self) -> list[str]:
        lo, hi = self.domain
        out = [f"barcode on births in [{lo:g}, {hi:g}), period a0 = {self.a0:g}, degree shift {self.N_L}"]
        for bar in self.bars:
            out.append(f"  degree {bar.degree:>3}: [{bar.birth:g}, {bar.death:g})")
        return out

    def csv_rows(self) -> list[tuple]:
        return [(b.birth, b.death, b.degree) for b in self.bars]


def _degree_slice_reduction(cx: FilteredComplex, d: int):
    slice_ = cx.monomials_of_degree(d - 1) + cx.monomials_of_degree(d) + cx.monomials_of_degree(d + 1)
    slice_.sort(key=cx.sort_key)
    idx = {m: i for i, m in enumerate(slice_)}
    cols = []
    for m in slice_:
        v = 0
        if cx.degree(m) >= d:
            for y in cx.boundary_of_monomial(m):
                v ^= 1 << idx[y]
        cols.append(v)
    return slice_, gf2.reduce_columns(cols)


def degree_bars(cx: FilteredComplex, d: int) -> list[Bar]:
    """All bars of the action filtration born in degree d (finite: degree d has finitely many monomials)."""
    slice_, red = _degree_slice_reduction(cx, d)
    bars = []
    for lw, j in red.pivot_of_low.items():
        birth_m, death_m = slice_[lw], slice_[j]
        if cx.degree(birth_m) != d:
            continue
        b, e = cx.action(birth_m), cx.action(death_m)
        if e - b > ACTION_EPS:
            bars.append(Bar(b, e, d, frozenset(slice_[i] for i in gf2.bits(red.R[j]))))
    for j in red.essential():
        if cx.degree(slice_[j]) == d:
            bars.append(Bar(cx.action(slice_[j]), INF, d, frozenset(slice_[i] for i in gf2.bits(red.V[j]))))
    return bars


def barcode(cx: FilteredComplex, domain: tuple[float, float] | Window | None = None) -> Barcode:
    """Bars with birth in [A, A + a0) (or the given range), using t-periodicity."""
    a0, N = cx.params.a0, cx.params.N_L
    if domain is None:
        domain = (0.0, a0)
    if isinstance(domain, Window):
        domain = (domain.a, domain.b)
    lo, hi = domain
    residues = sorted({g.degree % N for g in cx.generators})
    out = []
    for d in residues:
        for bar in degree_bars(cx, d):
            k_lo = math.floor((bar.birth - hi) / a0) - 1
            k_hi = math.ceil((bar.birth - lo) / a0) + 1
            for k in range(k_lo, k_hi + 1):
                s = bar.shifted(k, a0, N)
                if lo - ACTION_EPS <= s.birth < hi - ACTION_EPS:
                    out.append(s)
    out.sort(key=lambda b: (b.birth, b.degree, b.death))
    return Barcode(out, a0, N, (lo, hi))


# -- death action -----------------------------------------------------------------

@dataclass
class DeathResult:
    action: float
    witness: frozenset | None  # primitive y with dy = seed, minimal action

    @property
    def exponents(self) -> list[int]:
        return sorted(r for _, r in (self.witness or ()))


def death_action(cx: FilteredComplex, seed: Iterable[Monomial]) -> DeathResult:
    """Least a such that ``seed`` bounds in CF^{<=a}, together with a minimal-action primitive."""
    seed = frozenset(seed)
    if cx.boundary(seed):
        raise NotACycle(f"{format_chain(seed, cx)} is not a cycle")
    if not seed:
        return DeathResult(NEG_INF, frozenset())
    by_degree: dict[int, set] = {}
    for m in seed:
        by_degree.setdefault(cx.degree(m), set()).add(m)
    worst = NEG_INF
    witness: set = set()
    for d, z in sorted(by_degree.items()):
        target = cx.monomials_of_degree(d)
        tidx = {m: i for i, m in enumerate(target)}
        zbits = 0
        for m in z:
            zbits ^= 1 << tidx[m]
        basis = gf2.EliminationBasis()
        cand = cx.monomials_of_degree(d + 1)
        found = None
        for j, m in enumerate(cand):
            v = 0
            for y in cx.boundary_of_monomial(m):
                v ^= 1 << tidx[y]
            basis.add(v, 1 << j)
            tag = basis.solve(zbits)
            if tag is not None:
                found = (cx.action(m), frozenset(cand[i] for i in gf2.bits(tag)))
                break
        if found is None:
            return DeathResult(INF, None)
        worst = max(worst, found[0])
        witness |= found[1]
    return DeathResult(worst, frozenset(witness))
