"""Filtered chain maps with action-shift budgets."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np
from scipy import integrate, optimize

from .complex import (
    FilteredComplex,
    Monomial,
    Window,
    _expect_keys,
    action_of_chain,
    format_chain,
    load_complex,
)
from .errors import (
    BudgetExceeded,
    FormatError,
    HomotopyFails,
    NoPrimitive,
    NonFiniteSup,
    NotChainMap,
    ShiftExceeded,
)
from .laurent import ACTION_EPS
from .persistence import death_action, inclusion_map, induced_map, window_homology


@dataclass
class FilteredChainMap:
    """t-linear map given on t^0 generators; ``shift`` is the claimed action increase."""

    source: FilteredComplex
    target: FilteredComplex
    entries: Mapping[str, frozenset]
    shift: float = 0.0
    degree: int = 0
    homotopy: Mapping[str, frozenset] | None = None
    name: str = ""

    def __post_init__(self):
        src, tgt = set(self.source.ids), set(self.target.ids)
        clean = {}
        for g, chain in self.entries.items():
            if g not in src:
                raise FormatError(f"map entry for unknown source generator {g!r}")
            reduced: set = set()
            for y, r in chain:
                if y not in tgt:
                    raise FormatError(f"map image of {g!r} uses unknown target generator {y!r}")
                reduced ^= {(y, int(r))}
            clean[g] = frozenset(reduced)
        self.entries = clean

    def image_of_monomial(self, mono: Monomial) -> frozenset:
        g, r = mono
        return frozenset((y, s + r) for y, s in self.entries.get(g, ()))

    def image(self, chain: Iterable[Monomial]) -> frozenset:
        out: set = set()
        for m in chain:
            out ^= self.image_of_monomial(m)
        return frozenset(out)

    def compose(self, first: "FilteredChainMap") -> "FilteredChainMap":
        """self o first, with budget first.shift + self.shift."""
        entries = {g: self.image(first.entries.get(g, frozenset())) for g in first.source.ids}
        return FilteredChainMap(first.source, self.target, entries, first.shift + self.shift,
                                first.degree + self.degree, name=f"{self.name}o{first.name}")


def identity_map(cx: FilteredComplex, shift: float = 0.0) -> FilteredChainMap:
    return FilteredChainMap(cx, cx, {g: frozenset({(g, 0)}) for g in cx.ids}, shift, name="id")


@dataclass
class ChainMapReport:
    name: str
    chain_map: bool
    degree_ok: bool
    realized_shift: float
    budget: float
    homotopy_ok: bool | None = None
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.chain_map and self.degree_ok and self.realized_shift <= self.budget + ACTION_EPS \
            and self.homotopy_ok is not False

    def lines(self) -> list[str]:
        out = [f"chain map {self.name or '<unnamed>'}",
               f"  d f = f d           {'pass' if self.chain_map else 'FAIL'}",
               f"  degree preserved    {'pass' if self.degree_ok else 'FAIL'}",
               f"  realized shift      {self.realized_shift:g} (budget {self.budget:g})"]
        if self.homotopy_ok is not None:
            out.append(f"  homotopy identity   {'pass' if self.homotopy_ok else 'FAIL'}")
        out += [f"  {f}" for f in self.failures]
        return out


def realized_shift(f: FilteredChainMap) -> float:
    worst = float("-inf")
    for g in f.source.generators:
        img = f.entries.get(g.id, frozenset())
        if img:
            worst = max(worst, action_of_chain(img, f.target) - g.action)
    return worst if worst > float("-inf") else 0.0


def _homotopy_defect(f: FilteredChainMap, K: Mapping[str, frozenset]) -> list[str]:
    """Generators where f - id != dK + Kd (source and target must coincide)."""
    cx = f.source

    def k_img(chain):
        out: set = set()
        for g, r in chain:
            out ^= {(y, s + r) for y, s in K.get(g, ())}
        return out

    bad = []
    for g in cx.ids:
        lhs = set(f.entries.get(g, frozenset())) ^ {(g, 0)}
        rhs = set(cx.boundary(k_img({(g, 0)}))) ^ k_img(cx.boundary_of_monomial((g, 0)))
        if lhs != rhs:
            bad.append(g)
    return bad


def verify_chain_map(f: FilteredChainMap, raise_on_fail: bool = True) -> ChainMapReport:
    failures = []
    commutes = True
    degree_ok = True
    for g in f.source.ids:
        lhs = f.target.boundary(f.image_of_monomial((g, 0)))
        rhs = f.image(f.source.boundary_of_monomial((g, 0)))
        if lhs != rhs:
            commutes = False
            failures.append(f"NotChainMap at {g}: d f({g}) = {format_chain(lhs, f.target)}"
                            f" but f(d {g}) = {format_chain(rhs, f.target)}")
        d_src = f.source.gen(g).degree
        for y in f.entries.get(g, ()):
            if f.target.degree(y) != d_src + f.degree:
                degree_ok = False
                failures.append(f"NotChainMap at {g}: term {format_chain([y])} has degree {f.target.degree(y)}")
    shift = realized_shift(f)
    if shift > f.shift + ACTION_EPS:
        failures.append(f"ShiftExceeded: realized shift {shift:g} > budget {f.shift:g}")
    homotopy_ok = None
    if f.homotopy is not None:
        bad = _homotopy_defect(f, f.homotopy)
        homotopy_ok = not bad
        if bad:
            failures.append(f"HomotopyFails at {', '.join(bad)}")
    rep = ChainMapReport(f.name, commutes, degree_ok, shift, f.shift, homotopy_ok, failures)
    if raise_on_fail and not rep.ok:
        if not (commutes and degree_ok):
            raise NotChainMap(failures[0])
        if shift > f.shift + ACTION_EPS:
            raise ShiftExceeded(f"realized shift {shift:g} exceeds budget {f.shift:g}")
        raise HomotopyFails(failures[-1])
    return rep


@dataclass
class FactorizationReport:
    c1: float
    c2: float
    mode: str
    per_window: dict[str, bool]

    @property
    def ok(self) -> bool:
        return all(self.per_window.values())

    def lines(self) -> list[str]:
        out = [f"factorization phi o psi ~ inclusion (c1 = {self.c1:g}, c2 = {self.c2:g}, by {self.mode})"]
        for w, ok in self.per_window.items():
            out.append(f"  {w}: {'pass' if ok else 'FAIL'}")
        return out


def verify_factorization(psi: FilteredChainMap, phi: FilteredChainMap, c1: float, c2: float,
                         windows: Sequence[Window] = (), homotopy: Mapping[str, frozenset] | None = None
                         ) -> FactorizationReport:
    """Check CQ^{<=a} -psi-> CF^{<=a+c2} -phi-> CQ^{<=a+c2-c1} agrees with the inclusion."""
    verify_chain_map(psi)
    verify_chain_map(phi)
    if psi.shift > c2 + ACTION_EPS:
        raise BudgetExceeded(f"psi budget {psi.shift:g} exceeds c2 = {c2:g}")
    if phi.shift > -c1 + ACTION_EPS:
        raise BudgetExceeded(f"phi budget {phi.shift:g} exceeds -c1 = {-c1:g}")
    comp = phi.compose(psi)
    C = c2 - c1
    cq = psi.source
    results: dict[str, bool] = {}
    if homotopy is not None:
        K_shift = 0.0
        for g in cq.ids:
            img = homotopy.get(g, frozenset())
            if img:
                K_shift = max(K_shift, action_of_chain(img, cq) - cq.gen(g).action)
        if K_shift > C + ACTION_EPS:
            raise BudgetExceeded(f"homotopy shifts action by {K_shift:g} > c2 - c1 = {C:g}")
        bad = _homotopy_defect(comp, homotopy)
        results["chain homotopy"] = not bad
        if bad:
            raise HomotopyFails(f"phi psi - incl != dK + Kd at {', '.join(bad)}")
        return FactorizationReport(c1, c2, "chain homotopy", results)
    for w in windows:
        src = window_homology(cq, w)
        tgt = window_homology(cq, w.shifted(C))
        via = induced_map(src, tgt, comp.image_of_monomial, 0, "phi psi")
        incl = inclusion_map(cq, w, tgt.window, src, tgt)
        results[str(w)] = bool(np.array_equal(via.matrix, incl.matrix))
    rep = FactorizationReport(c1, c2, "window homology", results)
    if not rep.ok:
        bad = [w for w, ok in results.items() if not ok]
        raise HomotopyFails(f"phi psi differs from the inclusion on HF^{bad[0]}")
    return rep


@dataclass
class ChekanovResult:
    primitive: frozenset
    action: float
    exponents: list[int]
    exponents_forced_negative: bool

    @property
    def all_negative(self) -> bool:
        return all(r < 0 for r in self.exponents)


def chekanov_primitive(cx: FilteredComplex, max_class: Iterable[Monomial], budget: float) -> ChekanovResult:
    """Minimal-action y with dy = max_class, provided its action is within ``budget``."""
    max_class = frozenset(max_class)
    res = death_action(cx, max_class)
    if not max_class:
        return ChekanovResult(frozenset(), res.action, [], False)
    if res.witness is None or res.action > budget + ACTION_EPS:
        raise NoPrimitive(f"{format_chain(max_class, cx)} survives to action {res.action:g} > budget {budget:g}")
    degs = {cx.degree(m) + 1 for m in max_class}
    forced = all(r < 0 for d in degs for _, r in cx.monomials_of_degree(d))
    out = ChekanovResult(res.witness, res.action, res.exponents, forced)
    if forced:
        assert out.all_negative
    return out


# -- E+ -------------------------------------------------------------------------

Field = Callable[[float, np.ndarray], np.ndarray]


@dataclass
class HamiltonianPair:
    """Endpoints H_- (s -> -inf) and H_+ (s -> +inf) of a linear-interpolation homotopy.

    Both are callables ``H(t, z)`` vectorised over rows of ``z``; they are taken
    to vanish outside the box ``bounds`` (compact support in the model chart).
    """

    h_minus: Field
    h_plus: Field
    bounds: Sequence[tuple[float, float]]
    autonomous: bool = False
    lipschitz: float | None = None


@dataclass
class QuadratureConfig:
    points_per_axis: int = 64
    tol: float = 1e-6
    max_refinements: int = 3
    polish: bool = True
    max_grid: int = 2_000_000


def _grid(bounds, n):
    axes = [np.linspace(lo, hi, n) for lo, hi in bounds]
    return np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=-1)


def sup_over_box(f: Callable[[np.ndarray], np.ndarray], bounds, cfg: QuadratureConfig) -> float:
    dim = len(bounds)
    n = cfg.points_per_axis
    prev = None
    best = -np.inf
    for _ in range(cfg.max_refinements + 1):
        while n ** dim > cfg.max_grid and n > 3:
            n = n // 2 + 1
        pts = _grid(bounds, n)
        vals = np.asarray(f(pts), dtype=float)
        if not np.all(np.isfinite(vals)):
            raise NonFiniteSup("field is not finite on the sampling grid")
        i = int(np.argmax(vals))
        best = float(vals[i])
        if cfg.polish:
            res = optimize.minimize(lambda z: -float(f(z[None, :])[0]), pts[i], method="L-BFGS-B",
                                    bounds=list(bounds), options={"ftol": 1e-15, "gtol": 1e-12})
            if np.isfinite(res.fun):
                best = max(best, -float(res.fun))
        if prev is not None and abs(best - prev) <= cfg.tol:
            break
        prev = best
        n = 2 * n - 1
    return best


def e_plus(pair: HamiltonianPair, config: QuadratureConfig | None = None) -> float:
    """int_0^1 sup_x (H_+(t,x) - H_-(t,x)) dt; outside the box both fields vanish."""
    cfg = config or QuadratureConfig()

    def integrand(t: float) -> float:
        s = sup_over_box(lambda z: pair.h_plus(t, z) - pair.h_minus(t, z), pair.bounds, cfg)
        return max(s, 0.0)

    if pair.autonomous:
        return integrand(0.0)
    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=cfg.tol * 1e-3, epsrel=1e-10, limit=100)
    return float(val)


# -- JSON map format ------------------------------------------------------------------

def _entries_from_list(lst, where) -> dict[str, frozenset]:
    out: dict[str, set] = {}
    for i, e in enumerate(lst):
        _expect_keys(e, {"from", "chain"}, {"from", "chain"}, f"{where}[{i}]")
        acc = out.setdefault(str(e["from"]), set())
        for j, t in enumerate(e["chain"]):
            _expect_keys(t, {"to", "r"}, {"to", "r"}, f"{where}[{i}].chain[{j}]")
            acc ^= {(str(t["to"]), int(t["r"]))}
    return {g: frozenset(c) for g, c in out.items()}


def map_from_dict(obj, resolve: Callable[[str], FilteredComplex], name: str = "") -> FilteredChainMap:
    _expect_keys(obj, {"source", "target", "shift", "entries", "homotopy", "name", "degree"},
                 {"source", "target", "shift", "entries"}, "map")
    src = resolve(obj["source"])
    tgt = resolve(obj["target"])
    entries = _entries_from_list(obj["entries"], "entries")
    homotopy = None
    if "homotopy" in obj and obj["homotopy"] is not None:
        homotopy = _entries_from_list(obj["homotopy"], "homotopy")
    return FilteredChainMap(src, tgt, entries, float(obj["shift"]), int(obj.get("degree", 0)),
                            homotopy, name or obj.get("name", ""))


def map_to_dict(f: FilteredChainMap, source: str, target: str) -> dict:
    def enc(entries):
        return [{"from": g, "chain": [{"to": y, "r": r} for y, r in sorted(entries[g])]}
                for g in sorted(entries)]

    out = {"name": f.name, "source": source, "target": target, "shift": f.shift, "entries": enc(f.entries)}
    if f.homotopy is not None:
        out["homotopy"] = enc(f.homotopy)
    return out


def load_map(path) -> FilteredChainMap:
    from .corpus import load_model  # bundled names

    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc

    def resolve(ref: str) -> FilteredComplex:
        cand = path.parent / ref
        if ref.endswith(".json") and cand.exists():
            return load_complex(cand)
        return load_model(ref)

    return map_from_dict(obj, resolve, obj.get("name") or path.stem)
