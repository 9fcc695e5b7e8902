"""Filtered chain complexes over Z/2[t, t^-1].

Only the t^0 representative of each generator is stored.  A monomial is a pair
``(generator_id, r)`` standing for ``x t^r``; a chain is a frozenset of distinct
monomials (addition is symmetric difference).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

from .errors import (
    ActionIncrease,
    DegreeViolation,
    EndpointInSpectrum,
    FormatError,
    SquareNonzero,
    ValidationError,
)
from .laurent import ACTION_EPS, GradingParams, LaurentGF2, monomial_action, monomial_degree

Monomial = tuple[str, int]
Chain = frozenset

GENERATOR_KINDS = ("chord", "critical-point")
NEG_INF = float("-inf")


@dataclass(frozen=True)
class Generator:
    id: str
    degree: int
    action: float
    kind: str = "chord"

    def __post_init__(self):
        if self.kind not in GENERATOR_KINDS:
            raise FormatError(f"generator {self.id!r}: unknown kind {self.kind!r}")


@dataclass(frozen=True)
class Window:
    """Open action interval (a, b); quotient CF^{<b} / CF^{<=a}."""

    a: float
    b: float

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError(f"window needs a < b, got ({self.a}, {self.b})")

    def contains(self, action: float) -> bool:
        return self.a < action < self.b

    def shifted(self, c: float) -> "Window":
        return Window(self.a + c, self.b + c)

    def __str__(self):
        return f"({self.a:g}, {self.b:g})"


@dataclass(frozen=True)
class Spectrum:
    """Action spectrum {A(g) - r a0}: finitely many residues mod a0."""

    residues: tuple[float, ...]
    a0: float

    def distance(self, v: float) -> float:
        if not self.residues:
            return math.inf
        best = math.inf
        for res in self.residues:
            d = (v - res) % self.a0
            best = min(best, d, self.a0 - d)
        return best

    def __contains__(self, v: float) -> bool:
        return self.distance(v) <= ACTION_EPS

    def points_in(self, lo: float, hi: float) -> list[float]:
        """Spectrum values in the closed interval [lo, hi], sorted."""
        out = []
        for res in self.residues:
            k = math.ceil((lo - res - ACTION_EPS) / self.a0)
            while res + k * self.a0 <= hi + ACTION_EPS:
                out.append(res + k * self.a0)
                k += 1
        return sorted(out)


@dataclass(frozen=True)
class FilteredComplex:
    params: GradingParams
    generators: tuple[Generator, ...]
    # diff[x][y] = Laurent coefficient of y in dx
    diff: Mapping[str, Mapping[str, LaurentGF2]] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        ids = [g.id for g in self.generators]
        if len(set(ids)) != len(ids):
            raise FormatError("generator ids must be unique")
        known = set(ids)
        clean = {}
        for x, row in self.diff.items():
            if x not in known:
                raise FormatError(f"differential of unknown generator {x!r}")
            crow = {}
            for y, coeff in row.items():
                if y not in known:
                    raise FormatError(f"d{x} refers to unknown generator {y!r}")
                if coeff:
                    crow[y] = coeff
            if crow:
                clean[x] = crow
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "diff", clean)
        object.__setattr__(self, "_by_id", {g.id: g for g in self.generators})

    # -- lookup -----------------------------------------------------------
    def gen(self, gid: str) -> Generator:
        return self._by_id[gid]

    @property
    def ids(self) -> list[str]:
        return [g.id for g in self.generators]

    def degree(self, mono: Monomial) -> int:
        gid, r = mono
        return monomial_degree(self._by_id[gid].degree, r, self.params)

    def action(self, mono: Monomial) -> float:
        gid, r = mono
        return monomial_action(self._by_id[gid].action, r, self.params)

    def spectrum(self) -> Spectrum:
        a0 = self.params.a0
        res: list[float] = []
        for g in self.generators:
            v = g.action % a0
            if all(min(abs(v - u), a0 - abs(v - u)) > ACTION_EPS for u in res):
                res.append(v)
        return Spectrum(tuple(sorted(res)), a0)

    def terms(self, gid: str) -> list[tuple[str, int]]:
        """Terms (y, r) of d(x t^0), in a deterministic order."""
        row = self.diff.get(gid, {})
        return [(y, r) for y in sorted(row) for r in row[y]]

    # -- chain level ------------------------------------------------------
    def boundary_of_monomial(self, mono: Monomial) -> frozenset:
        gid, r = mono
        return frozenset((y, r + s) for y, s in self.terms(gid))

    def boundary(self, chain: Iterable[Monomial]) -> frozenset:
        out: set = set()
        for mono in chain:
            out ^= self.boundary_of_monomial(mono)
        return frozenset(out)

    def monomials_of_degree(self, d: int) -> list[Monomial]:
        """All monomials x t^r of degree d (finitely many: one r per generator at most)."""
        N = self.params.N_L
        out = []
        for g in self.generators:
            if (g.degree - d) % N == 0:
                out.append((g.id, (g.degree - d) // N))
        return sorted(out, key=self.sort_key)

    def sort_key(self, mono: Monomial):
        return (self.action(mono), mono[0], mono[1])

    def with_name(self, name: str) -> "FilteredComplex":
        return FilteredComplex(self.params, self.generators, self.diff, name)


def make_complex(params: GradingParams, generators: Iterable[Generator],
                 terms: Mapping[str, Iterable[tuple[str, int]]], name: str = "") -> FilteredComplex:
    """Build a complex from plain term lists ``{x: [(y, r), ...]}`` (repeated terms cancel)."""
    diff: dict[str, dict[str, LaurentGF2]] = {}
    for x, tlist in terms.items():
        row: dict[str, list[int]] = {}
        for y, r in tlist:
            row.setdefault(y, []).append(int(r))
        diff[x] = {y: LaurentGF2.from_terms(rs) for y, rs in row.items()}
    return FilteredComplex(params, tuple(generators), diff, name)


def action_of_chain(chain: Iterable[Monomial], cx: FilteredComplex) -> float:
    """Max action over the monomials of a chain; duplicates cancel mod 2 first.

    The empty chain has action -inf.
    """
    reduced: set = set()
    for mono in chain:
        reduced ^= {mono}
    if not reduced:
        return NEG_INF
    return max(cx.action(m) for m in reduced)


# -- validation ---------------------------------------------------------------

@dataclass
class ValidationReport:
    name: str
    checks: dict[str, bool]
    errors: list[ValidationError]

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def raise_if_invalid(self):
        if self.errors:
            raise self.errors[0]

    def lines(self) -> list[str]:
        out = [f"complex {self.name or '<unnamed>'}"]
        for axiom, passed in self.checks.items():
            out.append(f"  {axiom:<18} {'pass' if passed else 'FAIL'}")
        for err in self.errors:
            out.append(f"  {type(err).__name__}: {err}")
        out.append(f"  usable: {'yes' if self.ok else 'no'}")
        return out


def validate(cx: FilteredComplex) -> ValidationReport:
    """Check degree -1, action non-increase (equality only for r = 0) and d^2 = 0."""
    errors: list[ValidationError] = []
    deg_ok = act_ok = sq_ok = True
    for g in cx.generators:
        for y, r in cx.terms(g.id):
            if cx.degree((y, r)) != g.degree - 1:
                deg_ok = False
                errors.append(DegreeViolation(
                    f"d{g.id} has term {y}*t^{r} of degree {cx.degree((y, r))}, expected {g.degree - 1}",
                    g.id, (y, r)))
            act = cx.action((y, r))
            if act > g.action + ACTION_EPS or (r != 0 and act >= g.action - ACTION_EPS):
                act_ok = False
                errors.append(ActionIncrease(
                    f"d{g.id} has term {y}*t^{r} with action {act:g} vs A({g.id}) = {g.action:g}",
                    g.id, (y, r)))
        # d^2 over the Laurent ring
        square: dict[str, LaurentGF2] = {}
        for y, c_xy in cx.diff.get(g.id, {}).items():
            for z, c_yz in cx.diff.get(y, {}).items():
                square[z] = square.get(z, LaurentGF2.zero()) + c_xy * c_yz
        nonzero = {z: c for z, c in square.items() if c}
        if nonzero:
            sq_ok = False
            z = sorted(nonzero)[0]
            errors.append(SquareNonzero(f"d(d{g.id}) has coefficient {nonzero[z]} on {z}", g.id, z))
    checks = {"degree -1": deg_ok, "action rule": act_ok, "d^2 = 0": sq_ok}
    return ValidationReport(cx.name, checks, errors)


def require_valid(cx: FilteredComplex) -> FilteredComplex:
    validate(cx).raise_if_invalid()
    return cx


# -- windows ------------------------------------------------------------------

def check_window(cx: FilteredComplex, w: Window):
    spec = cx.spectrum()
    for end in (w.a, w.b):
        if end in spec:
            raise EndpointInSpectrum(f"window endpoint {end:g} lies in the action spectrum of {cx.name or 'complex'}")


@dataclass(frozen=True)
class QuotientComplexView:
    """Finite quotient complex CF^{<b}/CF^{<=a}, monomials sorted by (action, id, r)."""

    cx: FilteredComplex
    window: Window
    monomials: tuple[Monomial, ...]
    boundary: dict  # monomial -> frozenset of monomials inside the window

    @property
    def index(self) -> dict:
        return {m: i for i, m in enumerate(self.monomials)}

    def degrees(self) -> list[int]:
        return [self.cx.degree(m) for m in self.monomials]

    def actions(self) -> list[float]:
        return [self.cx.action(m) for m in self.monomials]

    def __len__(self):
        return len(self.monomials)


def window_r_range(cx: FilteredComplex, w: Window) -> tuple[int, int]:
    """Range of t-exponents that can land inside ``w``: ceil((b - a)/a0) + 2 of slack around the spread."""
    a0 = cx.params.a0
    if not cx.generators:
        return (0, -1)
    lo_act = min(g.action for g in cx.generators)
    hi_act = max(g.action for g in cx.generators)
    r_lo = math.floor((lo_act - w.b) / a0) - 2
    r_hi = math.ceil((hi_act - w.a) / a0) + 2
    return (r_lo, r_hi)


def window_complex(cx: FilteredComplex, w: Window, r_range: tuple[int, int] | None = None) -> QuotientComplexView:
    check_window(cx, w)
    a0 = cx.params.a0
    monos = []
    for g in cx.generators:
        lo = math.floor((g.action - w.b) / a0)
        hi = math.ceil((g.action - w.a) / a0)
        if r_range is not None:
            lo, hi = max(lo, r_range[0]), min(hi, r_range[1])
        for r in range(lo, hi + 1):
            if w.contains(monomial_action(g.action, r, cx.params)):
                monos.append((g.id, r))
    monos.sort(key=cx.sort_key)
    inside = set(monos)
    bd = {}
    for m in monos:
        # terms at or below a vanish in the quotient; nothing can exceed b
        bd[m] = frozenset(y for y in cx.boundary_of_monomial(m) if y in inside)
    return QuotientComplexView(cx, w, tuple(monos), bd)


# -- JSON instance format -------------------------------------------------------

_TOP_KEYS = {"params", "generators", "diff", "name"}


def _expect_keys(obj, allowed, required, where):
    if not isinstance(obj, dict):
        raise FormatError(f"{where}: expected an object")
    extra = set(obj) - set(allowed)
    if extra:
        raise FormatError(f"{where}: unknown field(s) {sorted(extra)}")
    missing = set(required) - set(obj)
    if missing:
        raise FormatError(f"{where}: missing field(s) {sorted(missing)}")


def params_from_dict(obj) -> GradingParams:
    if isinstance(obj, dict) and "a0" in obj:
        raise FormatError("params: a0 is derived from tau * N_L and must not be supplied")
    _expect_keys(obj, {"N_L", "tau"}, {"N_L", "tau"}, "params")
    try:
        return GradingParams(obj["N_L"], obj["tau"])
    except ValueError as exc:
        raise FormatError(f"params: {exc}") from exc


def complex_from_dict(obj, name: str = "") -> FilteredComplex:
    _expect_keys(obj, _TOP_KEYS, {"params", "generators", "diff"}, "complex")
    params = params_from_dict(obj["params"])
    gens = []
    for i, g in enumerate(obj["generators"]):
        _expect_keys(g, {"id", "degree", "action", "kind"}, {"id", "degree", "action"}, f"generators[{i}]")
        if int(g["degree"]) != g["degree"]:
            raise FormatError(f"generators[{i}]: degree must be an integer")
        gens.append(Generator(str(g["id"]), int(g["degree"]), float(g["action"]), g.get("kind", "chord")))
    terms: dict[str, list] = {}
    for i, entry in enumerate(obj["diff"]):
        _expect_keys(entry, {"from", "terms"}, {"from", "terms"}, f"diff[{i}]")
        lst = terms.setdefault(str(entry["from"]), [])
        for j, t in enumerate(entry["terms"]):
            _expect_keys(t, {"to", "r", "coeff"}, {"to", "r"}, f"diff[{i}].terms[{j}]")
            coeff = t.get("coeff", 1)
            if coeff not in (0, 1):
                raise FormatError(f"diff[{i}].terms[{j}]: coeff must be 0 or 1")
            if coeff:
                lst.append((str(t["to"]), int(t["r"])))
    return make_complex(params, gens, terms, name or obj.get("name", ""))


def complex_to_dict(cx: FilteredComplex) -> dict:
    return {
        "name": cx.name,
        "params": {"N_L": cx.params.N_L, "tau": cx.params.tau},
        "generators": [{"id": g.id, "degree": g.degree, "action": g.action, "kind": g.kind}
                       for g in cx.generators],
        "diff": [{"from": x, "terms": [{"to": y, "r": r, "coeff": 1} for y, r in cx.terms(x)]}
                 for x in cx.ids if cx.terms(x)],
    }


def load_complex(path) -> FilteredComplex:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return complex_from_dict(obj, name=obj.get("name") or path.stem)


def format_chain(chain: Iterable[Monomial], cx: FilteredComplex | None = None) -> str:
    monos = sorted(chain, key=cx.sort_key if cx else None)
    if not monos:
        return "0"
    parts = []
    for gid, r in monos:
        parts.append(gid if r == 0 else (f"{gid}*t" if r == 1 else f"{gid}*t^{r}"))
    return " + ".join(parts)
