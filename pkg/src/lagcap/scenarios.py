"""Capacity instances, the slicing replay of the capacity inequality, and the product-family table."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .chainmaps import FilteredChainMap, chekanov_primitive, verify_chain_map
from .complex import FilteredComplex, Generator, Window, make_complex, validate
from .errors import CollarViolation, LocalIsoFails, NoPrimitive, PreconditionError, VerdictFailure
from .laurent import ACTION_EPS, GradingParams
from .morse import build_pearl_complex, circle_pearl
from .persistence import exact_triangle, gf2, induced_map, inclusion_map, window_homology


def _is_integer_multiple(v: float, a0: float) -> bool:
    q = v / a0
    return abs(q - round(q)) * a0 <= ACTION_EPS


@dataclass
class CapacityInstance:
    """Filtered complex standing for CF(L; H) of an admissible H with maximum m_H."""

    complex: FilteredComplex
    m_H: float
    kappa0: int
    n: int
    d_L: float
    name: str = ""

    def __post_init__(self):
        if self.m_H <= 0:
            raise PreconditionError(f"{self.name}: m(H) must be positive")
        if _is_integer_multiple(self.m_H, self.a0):
            raise PreconditionError(f"{self.name}: m(H)/a0 = {self.m_H / self.a0:g} is an integer (resonant)")

    @property
    def a0(self) -> float:
        return self.complex.params.a0

    @property
    def N_L(self) -> int:
        return self.complex.params.N_L

    def spectrum_matches(self) -> bool:
        """Spectrum is exactly {k a0} u {m_H + k a0}."""
        expected = sorted({0.0, self.m_H % self.a0})
        got = list(self.complex.spectrum().residues)
        return len(got) == len(expected) and all(abs(u - v) <= ACTION_EPS for u, v in zip(got, expected))

    def collar_gap(self) -> float:
        """Distance from m_H to the rest of the spectrum."""
        spec = self.complex.spectrum()
        pts = spec.points_in(self.m_H - self.a0, self.m_H + self.a0)
        others = [abs(p - self.m_H) for p in pts if abs(p - self.m_H) > ACTION_EPS]
        return min(others) if others else self.a0

    def local_window(self, delta: float, shift: int = 0) -> Window:
        return Window(self.m_H - delta + shift * self.a0, self.m_H + delta + shift * self.a0)


def d_instance(m: float, name: str, params: GradingParams | None = None, d_L: float = 1.0,
               displaced: bool = True) -> CapacityInstance:
    """Two-generator model: chord x at the minimum (action 0), P at the maximum (action m), dx = P t."""
    params = params or GradingParams(2, 0.5)
    gens = [Generator("x", 0, 0.0), Generator("P", 1, float(m))]
    cx = make_complex(params, gens, {"x": [("P", 1)]} if displaced else {}, name)
    return CapacityInstance(cx, float(m), 1, 1, d_L, name)


# -- reports ------------------------------------------------------------------------

@dataclass
class Step:
    name: str
    ok: bool
    lines: list[str]


@dataclass
class ScenarioReport:
    name: str
    steps: list[Step] = field(default_factory=list)
    verdict: bool = True
    summary: list[str] = field(default_factory=list)
    artifacts: dict[str, list[list]] = field(default_factory=dict)

    def add(self, step: Step):
        self.steps.append(step)
        self.verdict = self.verdict and step.ok

    def text(self) -> str:
        out = [f"== scenario {self.name} =="]
        for s in self.steps:
            out.append(f"[{'PASS' if s.ok else 'FAIL'}] {s.name}")
            out += [f"    {ln}" for ln in s.lines]
        out += self.summary
        out.append(f"verdict: {'PASS' if self.verdict else 'FAIL'}")
        return "\n".join(out) + "\n"

    def write_artifacts(self, out_dir) -> list[Path]:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        paths = []
        for fname, rows in sorted(self.artifacts.items()):
            buf = io.StringIO()
            csv.writer(buf, lineterminator="\n").writerows(rows)
            p = out_dir / fname
            p.write_text(buf.getvalue(), encoding="utf-8")
            paths.append(p)
        (out_dir / f"{self.name}.txt").write_text(self.text(), encoding="utf-8")
        return paths


def _fmt(v: float) -> str:
    return f"{v:.10g}"


# -- slicing --------------------------------------------------------------------------

def slicing_partition(m_H: float, a0: float, steps: int | None = None) -> list[float]:
    """0 = tau_0 < ... < tau_N = 1 with (tau_{k+1} - tau_k) m_H < a0/2 and tau_k m_H not in Z a0 (k >= 1)."""
    if m_H <= 0 or a0 <= 0:
        raise PreconditionError("need m_H > 0 and a0 > 0")
    if _is_integer_multiple(m_H, a0):
        raise PreconditionError(f"m_H/a0 = {m_H / a0:g} is an integer (resonant endpoint)")
    N = math.floor(2 * m_H / a0) + 1
    if steps is not None:
        if steps < N:
            raise PreconditionError(f"{steps} steps are too coarse; need at least {N}")
        N = steps
    taus = [k / N for k in range(N + 1)]
    for k in range(1, N):
        j = 0
        while _is_integer_multiple((taus[k] + j * 1e-7) * m_H, a0):
            j += 1
        taus[k] += j * 1e-7
    for t0, t1 in zip(taus, taus[1:]):
        assert (t1 - t0) * m_H < a0 / 2
    return taus


# -- base case / inductive step -------------------------------------------------------------

def _check_collar(inst: CapacityInstance, delta: float):
    if delta <= 0:
        raise CollarViolation("delta must be positive")
    spec = inst.complex.spectrum()
    hits = [p for p in spec.points_in(inst.m_H - 2 * delta, inst.m_H + 2 * delta) if abs(p - inst.m_H) > ACTION_EPS]
    if hits:
        raise CollarViolation(f"{inst.name}: collar ({_fmt(inst.m_H - 2 * delta)}, {_fmt(inst.m_H + 2 * delta)})"
                              f" meets the spectrum at {_fmt(hits[0])}")
    top = inst.kappa0 * inst.a0
    if spec.distance(top + delta) <= ACTION_EPS or spec.distance(top - delta) <= ACTION_EPS:
        raise CollarViolation(f"{inst.name}: kappa0 a0 +- delta lies in the spectrum")


def verify_base_case(inst: CapacityInstance, delta: float) -> Step:
    """HF^(m-d, m+d) = Z/2[n] and its inclusion into HF^(m-d, kappa0 a0 + d) is zero."""
    if not inst.m_H < inst.a0 / 2:
        raise PreconditionError(f"{inst.name}: base case needs m(H) = {_fmt(inst.m_H)} < a0/2 = {_fmt(inst.a0 / 2)}")
    _check_collar(inst, delta)
    src = window_homology(inst.complex, inst.local_window(delta))
    tgt = window_homology(inst.complex, Window(inst.m_H - delta, inst.kappa0 * inst.a0 + delta))
    iota = inclusion_map(inst.complex, src.window, tgt.window, src, tgt)
    local_ok = src.is_point(inst.n)
    lines = [f"{inst.name}: m(H) = {_fmt(inst.m_H)}, delta = {_fmt(delta)}, kappa0 a0 = {_fmt(inst.kappa0 * inst.a0)}",
             f"HF^{src.window} ranks {src.ranks} ({'= Z/2[%d]' % inst.n if local_ok else 'not Z/2[n]'})",
             f"HF^{tgt.window} ranks {tgt.ranks or 0}",
             f"iota rank {iota.rank} ({'zero map' if iota.is_zero() else 'NONZERO'})"]
    return Step(f"base case {inst.name}", local_ok and iota.is_zero(), lines)


def verify_inductive_step(inst1: CapacityInstance, inst2: CapacityInstance, psi: FilteredChainMap,
                          delta: float) -> Step:
    """From iota_1 = 0 for H1 conclude iota_2 = 0 for H2 and m(H2) < kappa0 a0."""
    D = inst2.m_H - inst1.m_H
    a0 = inst1.a0
    if not 0 < D < a0 / 2:
        raise PreconditionError(f"need 0 < m(H2) - m(H1) < a0/2, got {_fmt(D)}")
    if inst1.kappa0 != inst2.kappa0:
        raise PreconditionError("instances disagree on kappa0")
    k0a0 = inst1.kappa0 * a0
    if inst1.m_H >= k0a0:
        raise PreconditionError(f"m(H1) = {_fmt(inst1.m_H)} >= kappa0 a0 = {_fmt(k0a0)}: hypothesis window is empty")
    _check_collar(inst1, delta)
    _check_collar(inst2, delta)
    lines = [f"{inst1.name} -> {inst2.name}: Delta = {_fmt(D)}, delta = {_fmt(delta)}, kappa0 a0 = {_fmt(k0a0)}"]
    reasons = []
    rep = verify_chain_map(psi, raise_on_fail=False)
    if not rep.ok:
        reasons.append("psi is not a filtered chain map within budget Delta")
    elif psi.shift > D + ACTION_EPS:
        reasons.append(f"psi budget {_fmt(psi.shift)} exceeds Delta")
    lines.append(f"continuation map: realized shift {_fmt(rep.realized_shift)}, "
                 f"{'chain map' if rep.chain_map and rep.degree_ok else 'NOT a chain map'}")
    cx1, cx2 = inst1.complex, inst2.complex
    loc1 = window_homology(cx1, inst1.local_window(delta))
    loc2 = window_homology(cx2, inst2.local_window(delta))
    psi_loc = induced_map(loc1, loc2, psi.image_of_monomial, 0, "psi")
    if not psi_loc.is_iso():
        raise LocalIsoFails(f"psi: HF^{loc1.window} -> HF^{loc2.window} is not an isomorphism")
    lines.append(f"local iso psi: HF^{loc1.window} -> HF^{loc2.window}")
    big1 = window_homology(cx1, Window(inst1.m_H - delta, k0a0 + delta))
    iota1 = inclusion_map(cx1, loc1.window, big1.window, loc1, big1)
    lines.append(f"hypothesis iota_1: HF^{loc1.window} -> HF^{big1.window} {'zero' if iota1.is_zero() else 'NONZERO'}")
    if not iota1.is_zero():
        reasons.append("hypothesis fails: iota_1 is not zero")
    big2 = window_homology(cx2, Window(inst2.m_H - delta, k0a0 + D + delta))
    iota2p = inclusion_map(cx2, loc2.window, big2.window, loc2, big2)
    psi_big = induced_map(big1, big2, psi.image_of_monomial, 0, "psi")
    left = gf2.matmul(psi_big.matrix, iota1.matrix)
    right = gf2.matmul(iota2p.matrix, psi_loc.matrix)
    square = bool(np.array_equal(left, right))
    lines.append(f"commuting square psi o iota_1 = iota_2' o psi: {'yes' if square else 'NO'}")
    if not square:
        reasons.append("square does not commute")
    lines.append(f"iota_2': HF^{loc2.window} -> HF^{big2.window} rank {iota2p.rank}")
    if inst2.m_H > k0a0:
        msg = (f"m(H2) = {_fmt(inst2.m_H)} > kappa0 a0 = {_fmt(k0a0)}: no spectrum in "
               f"({_fmt(inst2.m_H + delta)}, {_fmt(k0a0 + D + delta)}], so iota_2' is "
               f"{'an isomorphism' if iota2p.is_iso() else 'not an isomorphism'}")
        lines.append(msg)
        if iota2p.is_iso() and iota1.is_zero():
            reasons.append("contradiction: iota_2' is an isomorphism while the square forces it to vanish")
        reasons.append(f"conclusion m(H2) < kappa0 a0 fails")
        return Step(f"inductive step {inst1.name} -> {inst2.name}", False, lines + [f"reason: {r}" for r in reasons])
    tri = exact_triangle(cx2, inst2.m_H - delta, k0a0 + delta, k0a0 + D + delta)
    lines += tri.lines()
    delta_map = tri.maps["delta"]
    into_n = delta_map.rank_into_degree(inst2.n)
    third = window_homology(cx2, Window(k0a0 + delta, k0a0 + D + delta))
    lines.append(f"degree argument: HF^{third.window} in degrees {sorted(third.ranks) or '[]'}; "
                 f"image of delta meets degree {inst2.n} with rank {into_n}")
    if into_n:
        reasons.append(f"image of delta meets degree n = {inst2.n}")
    mid = window_homology(cx2, Window(inst2.m_H - delta, k0a0 + delta))
    iota2 = inclusion_map(cx2, loc2.window, mid.window, loc2, mid)
    lines.append(f"conclusion iota_2: HF^{loc2.window} -> HF^{mid.window} {'zero' if iota2.is_zero() else 'NONZERO'}")
    lines.append(f"conclusion m(H2) = {_fmt(inst2.m_H)} < kappa0 a0 = {_fmt(k0a0)}")
    if not iota2.is_zero():
        reasons.append("iota_2 is not zero")
    ok = not reasons
    return Step(f"inductive step {inst1.name} -> {inst2.name}", ok, lines + [f"reason: {r}" for r in reasons])


def identity_continuation(inst1: CapacityInstance, inst2: CapacityInstance) -> FilteredChainMap:
    """Continuation map matching generators by id, with budget m(H2) - m(H1)."""
    return FilteredChainMap(inst1.complex, inst2.complex, {g: frozenset({(g, 0)}) for g in inst1.complex.ids},
                            inst2.m_H - inst1.m_H, name=f"psi:{inst1.name}->{inst2.name}")


# -- theorem replay ------------------------------------------------------------------

@dataclass
class TheoremFamily:
    name: str
    pearl: FilteredComplex  # CQ(L) with constant action 0
    max_class: frozenset
    n: int
    d_L: float
    m0: float
    partition: list[float]
    instances: list[CapacityInstance]
    maps: list[FilteredChainMap]


def circle_instance(m: float, name: str, d_L: float = 1.0) -> CapacityInstance:
    """CF of tau H0 for the circle in the plane: chords m (minimum) and M (maximum), dm = M t."""
    params = GradingParams(2, 0.5)
    gens = [Generator("m", 0, 0.0), Generator("M", 1, float(m))]
    return CapacityInstance(make_complex(params, gens, {"m": [("M", 1)]}, name), float(m), 1, 1, d_L, name)


def circle_family(m0: float = 0.9, d_L: float = 1.0, steps: int | None = None) -> TheoremFamily:
    params = GradingParams(2, 0.5)
    pearl = build_pearl_complex(circle_pearl(0.0), params, mode=0.0).with_name("CQ(circle)")
    taus = slicing_partition(m0, params.a0, steps)
    insts = [circle_instance(t * m0, f"tau{k}", d_L) for k, t in enumerate(taus) if k >= 1]
    maps = [identity_continuation(a, b) for a, b in zip(insts, insts[1:])]
    return TheoremFamily("circle", pearl, frozenset({("M", 0)}), 1, d_L, m0, taus, insts, maps)


def bundled_instances() -> list[CapacityInstance]:
    """Every capacity instance used by the bundled scenarios."""
    return circle_family().instances + [d_instance(0.3, "D1"), d_instance(0.6, "D2")]


def choose_delta(insts: Sequence[CapacityInstance]) -> float:
    """A delta inside every collar: a quarter of the smallest gap, capped at 0.05 a0."""
    gaps = [i.collar_gap() for i in insts]
    a0 = insts[0].a0
    d = min(min(gaps) / 4.0, 0.05 * a0)
    top = insts[0].kappa0 * a0
    for i in insts:
        while i.complex.spectrum().distance(top + d) <= 2 * ACTION_EPS or \
                i.complex.spectrum().distance(i.m_H + d) <= 2 * ACTION_EPS:
            d *= 0.9
    return d


def run_theorem_scenario(fam: TheoremFamily, delta: float | None = None) -> ScenarioReport:
    rep = ScenarioReport(f"theorem-{fam.name}")
    rep.add(Step("partition", True, [
        f"tau = [{', '.join(_fmt(t) for t in fam.partition)}]",
        f"max step x m(H0) = {_fmt(max(b - a for a, b in zip(fam.partition, fam.partition[1:])) * fam.m0)}"
        f" < a0/2 = {_fmt(fam.pearl.params.a0 / 2)}"]))
    v = validate(fam.pearl)
    rep.add(Step(f"validate {fam.pearl.name}", v.ok, v.lines()[1:]))
    a0 = fam.pearl.params.a0
    try:
        ch = chekanov_primitive(fam.pearl, fam.max_class, fam.d_L)
        kappa0 = int(round(ch.action / a0))
        wit = " + ".join(f"{g}*t^{r}" for g, r in sorted(ch.primitive))
        rep.add(Step("Chekanov primitive", abs(ch.action - kappa0 * a0) <= ACTION_EPS, [
            f"d({wit}) = max class, action {_fmt(ch.action)} = kappa0 a0 with kappa0 = {kappa0}",
            f"exponents {ch.exponents} ({'all negative' if ch.all_negative else 'not all negative'}"
            f"{', forced by degree' if ch.exponents_forced_negative else ''})"]))
    except NoPrimitive as exc:
        kappa0 = None
        rep.add(Step("Chekanov primitive", False, [f"metadata inconsistency: {exc}",
                                                    f"declared d(L) = {_fmt(fam.d_L)} is below the death action"]))
    if kappa0 is None:
        rep.summary.append("final: no kappa0 within the declared displacement energy")
        rep.verdict = False
        return rep
    insts = [CapacityInstance(i.complex, i.m_H, kappa0, i.n, i.d_L, i.name) for i in fam.instances]
    d = delta if delta is not None else choose_delta(insts)
    for inst in insts:
        local = [window_homology(inst.complex, inst.local_window(s * d, l)) for s in (1.0, 0.7, 0.4)
                 for l in (0,)]
        valid = validate(inst.complex).ok
        ok = valid and inst.spectrum_matches() and all(h.is_point(inst.n) for h in local)
        rep.add(Step(f"instance {inst.name}", ok, [
            f"filtered complex axioms: {'yes' if valid else 'NO'}",
            f"m(H) = {_fmt(inst.m_H)}, spectrum two-coset form: {'yes' if inst.spectrum_matches() else 'NO'}",
            f"HF^(m-d, m+d) = Z/2[{inst.n}] for d in {{{_fmt(d)}, {_fmt(0.7 * d)}, {_fmt(0.4 * d)}}}: "
            f"{'yes' if ok else 'NO'}"]))
    rep.add(verify_base_case(insts[0], d))
    for k, (a, b) in enumerate(zip(insts, insts[1:])):
        psi = fam.maps[k]
        psi = FilteredChainMap(a.complex, b.complex, psi.entries, psi.shift, name=psi.name)
        step = verify_inductive_step(a, b, psi, d)
        rep.add(step)
        if not step.ok:
            rep.summary.append(f"induction stops at {a.name} -> {b.name}; {len(insts) - k - 2} later steps not run")
            break
    m0 = insts[-1].m_H
    strict = m0 < kappa0 * a0
    budget = kappa0 * a0 <= fam.d_L + ACTION_EPS
    rep.summary += [f"m(H0) = {_fmt(m0)} < kappa0 a0 = {_fmt(kappa0 * a0)}: {'yes' if strict else 'NO'}",
                    f"kappa0 a0 = {_fmt(kappa0 * a0)} <= d(L) = {_fmt(fam.d_L)}: {'yes' if budget else 'NO'}"]
    rep.verdict = rep.verdict and strict and budget
    rep.artifacts[f"theorem-{fam.name}.csv"] = [["step", "verdict"]] + [[s.name, "pass" if s.ok else "fail"]
                                                                         for s in rep.steps]
    return rep


def single_instance_scenario(inst: CapacityInstance, delta: float | None = None) -> ScenarioReport:
    rep = ScenarioReport(f"base-{inst.name}")
    rep.add(verify_base_case(inst, delta if delta is not None else choose_delta([inst])))
    return rep


# -- counterexample family -----------------------------------------------------------------

def counterexample_factor():
    """Fixed factor H on the cotangent-model chart C (L = R): slope 1.25 < pi/2, m(H) = 0.5."""
    from .dynamics.models import RadialProfile

    return RadialProfile.single(0.05, 0.5, 1.25, 0.05)


def counterexample_report(epsilons: Sequence[float], chord_check: bool = True,
                          config=None) -> ScenarioReport:
    from .dynamics.admissibility import max_value, product_chord_correspondence
    from .dynamics.flow import IntegratorConfig
    from .dynamics.models import circle_beta, product_extend, radial_model

    eps = [float(e) for e in epsilons]
    if any(e <= 0 for e in eps):
        raise PreconditionError("epsilons must be positive")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise PreconditionError("epsilons must be decreasing")
    rep = ScenarioReport("counterexample")
    factor = counterexample_factor()
    fmodel = radial_model(factor, 1, "H")
    m = factor.maximum
    cfg = config or IntegratorConfig(step=2e-3)
    rows = [["epsilon", "capacity_lower_bound", "hofer_norm", "displacement_energy", "ratio"]]
    for e in eps:
        model = product_extend(factor, e, circle_beta(e), 1, f"H~(eps={e:g})")
        top = max_value(model, points_per_axis=25)
        box = np.linspace(-model.extent, model.extent, 25)
        grid = np.stack([a.ravel() for a in np.meshgrid(box, box, box, box, indexing="ij")], axis=-1)
        low = float(np.min(model.H(grid)))
        norm = top - low
        lines = [f"max H~ = {_fmt(top)}, min H~ = {_fmt(low)}, ||H~|| = {_fmt(norm)} (m(H) = {_fmt(m)})",
                 f"d(L_eps) = {_fmt(e)} (declared), ratio = {_fmt(m / e)}"]
        ok = abs(top - m) <= 1e-8 and abs(norm - m) <= 1e-8
        if chord_check:
            cc = product_chord_correspondence(model, fmodel, 1.8, grid=6, config=cfg)
            lines.append(f"chord correspondence t -> (p, x(t)): {cc.pairs} seeds, unmatched {cc.unmatched}, "
                         f"max |dT| {cc.max_time_error:.2e}")
            ok = ok and cc.ok
        rep.add(Step(f"eps = {e:g}", ok, lines))
        rows.append([_fmt(e), _fmt(m), _fmt(norm), _fmt(e), _fmt(m / e)])
    if eps:
        rep.summary.append(f"capacity column constant at m(H) = {_fmt(m)}; energy column equals eps; "
                           f"ratio grows like 1/eps")
    rep.artifacts["counterexample.csv"] = rows
    return rep


# -- negative controls ----------------------------------------------------------------------

def negative_base_case() -> ScenarioReport:
    inst = d_instance(0.3, "nondisplaced", displaced=False)
    return single_instance_scenario(inst, 0.05)


def negative_inductive_step() -> ScenarioReport:
    """m1 = 0.8 displaced, m2 = 1.2 undisplaced: the max class survives and the contradiction surfaces."""
    i1 = d_instance(0.8, "m0.8")
    i2 = d_instance(1.2, "m1.2", displaced=False)
    psi = FilteredChainMap(i1.complex, i2.complex, {"x": frozenset({("x", 0)}), "P": frozenset({("P", 0)})},
                           0.4, name="psi")
    rep = ScenarioReport("negative-step")
    rep.add(verify_inductive_step(i1, i2, psi, 0.05))
    return rep


def d1_d2_scenario(delta: float = 0.05) -> ScenarioReport:
    d1 = d_instance(0.3, "D1")
    d2 = d_instance(0.6, "D2")
    rep = ScenarioReport("d1-d2")
    rep.add(verify_base_case(d1, delta))
    rep.add(verify_inductive_step(d1, d2, identity_continuation(d1, d2), delta))
    return rep


SCENARIOS = ("circle", "d1-base", "d1-d2", "counterexample")
NEGATIVE_SCENARIOS = ("negative-base", "negative-step")


def run_named(name: str) -> list[ScenarioReport]:
    if name == "all":
        return [r for n in SCENARIOS for r in run_named(n)]
    if name == "circle":
        return [run_theorem_scenario(circle_family())]
    if name == "d1-base":
        return [single_instance_scenario(d_instance(0.3, "D1"), 0.05)]
    if name == "d1-d2":
        return [d1_d2_scenario()]
    if name == "counterexample":
        return [counterexample_report([0.1, 0.03, 0.01])]
    if name == "negative-base":
        return [negative_base_case()]
    if name == "negative-step":
        return [negative_inductive_step()]
    raise PreconditionError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS + NEGATIVE_SCENARIOS + ('all',))}")
