"""Admissibility of model Hamiltonians, the rho o H reparametrization, and the radial capacity bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..chainmaps import QuadratureConfig, sup_over_box
from ..errors import AlphaTooLarge, InfeasibleRho
from .flow import Chord, IntegratorConfig, chord_scan, flow, midpoint_step, shortest_chord
from .models import (
    HamiltonianModel,
    RadialProfile,
    grid_points,
    radial_model,
    smoothstep,
    smoothstep_int,
)

PASS, FAIL, UNVERIFIED = "pass", "fail", "unverified"


def max_value(model: HamiltonianModel, points_per_axis: int = 64) -> float:
    """m(H): grid maximum over the support box, polished by local ascent."""
    cfg = QuadratureConfig(points_per_axis=points_per_axis, tol=1e-10, max_refinements=1)
    box = [(-model.extent, model.extent)] * model.dim
    return sup_over_box(model.H, box, cfg)


@dataclass
class AdmissibilityReport:
    name: str
    m_H: float
    eta_margin: float
    conditions: dict[str, tuple[str, str]]  # name -> (verdict, detail)
    shortest: Chord | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def admissible(self) -> bool | None:
        verdicts = [v for v, _ in self.conditions.values()]
        if FAIL in verdicts:
            return False
        if UNVERIFIED in verdicts:
            return None
        return True

    @property
    def ok(self) -> bool:
        return self.admissible is True

    def lines(self) -> list[str]:
        verdict = {True: "admissible", False: "NOT admissible", None: "unverified"}[self.admissible]
        out = [f"{self.name}: {verdict}  (m(H) = {self.m_H:.10g}, eta margin {self.eta_margin:g})"]
        for k, (v, d) in self.conditions.items():
            out.append(f"  {k:<22} {v:<10} {d}")
        out += [f"  note: {n}" for n in self.notes]
        return out


def _profile_conditions(profile: RadialProfile) -> tuple[tuple[str, str], tuple[str, str]]:
    m = profile.maximum
    if not profile.segments or m <= 0:
        ball = (FAIL, "H vanishes identically on L")
    elif profile.plateau > 0:
        ball = (PASS, f"max set on L is the ball |x|^2 <= {profile.plateau:g}")
    else:
        ball = (FAIL, "max set on L is a single point")
    levels = profile.critical_levels()
    extra = [v for v in levels if abs(v) > 1e-9 and abs(v - m) > 1e-9]
    crit = (PASS, f"critical values {{0, {m:.6g}}}") if not extra and m > 0 else \
        (FAIL, f"critical values {sorted(round(v, 9) for v in levels)}")
    return ball, crit


def check_admissible(model: HamiltonianModel, eta_margin: float = 0.0, grid: int = 64,
                     config: IntegratorConfig | None = None) -> AdmissibilityReport:
    """Four-condition check; short chords are searched up to T = 1 + eta_margin."""
    m_H = model.m_closed_form if model.m_closed_form is not None else max_value(model)
    conds: dict[str, tuple[str, str]] = {}
    notes: list[str] = []
    chords = chord_scan(model, 1.0 + eta_margin, grid, config)
    short = shortest_chord(chords)
    if short is None:
        conds["1 short chords"] = (PASS, f"no nonconstant chord with T <= {1 + eta_margin:g} on a grid of {grid}")
    else:
        conds["1 short chords"] = (FAIL, f"chord from {np.round(short.start, 6).tolist()} with T = {short.return_time:.9g}")
    notes.append("chord search is grid-limited; a pass does not exclude chords between seeds")
    profile = model.info.get("profile")
    fam = model.family
    if fam in ("radial", "weinstein"):
        conds["2 max set is a ball"], conds["3 critical values"] = _profile_conditions(profile)
        conds["4 compact support"] = (PASS, f"support in |z| <= {model.extent:g}")
    elif fam == "product":
        _, crit = _profile_conditions(profile)
        conds["2 max set is a ball"] = (FAIL, "max set on L contains a circle factor S_eps x ball")
        conds["3 critical values"] = crit
        conds["4 compact support"] = (FAIL, "H~ equals m(H) outside the support of beta")
        notes.append("ambient max set of H~ is unbounded; only its trace on L is decisive")
    else:
        conds["2 max set is a ball"] = (UNVERIFIED, "only decided for tagged families")
        conds["3 critical values"] = (UNVERIFIED, "no closed form for H restricted to L")
        conds["4 compact support"] = (PASS, f"bump cut-off at radius {model.extent:g}")
    return AdmissibilityReport(model.name, float(m_H), eta_margin, conds, short, notes)


# -- reparametrization ---------------------------------------------------------------

@dataclass(frozen=True)
class Rho:
    """rho(s) = a for s <= a, s for s >= b, increasing with 0 < rho' <= 1 + min(eta, 1)/2 on (a, b)."""

    a: float
    b: float
    eta: float

    @property
    def lam(self) -> float:
        # ramp width fixed by int_0^1 rho' du = 1; lam <= 1/2 needs kappa <= 1/2
        return self.kappa / (0.5 + self.kappa)

    @property
    def kappa(self) -> float:
        return min(self.eta, 1.0) / 2.0

    def _u(self, s):
        return (np.asarray(s, dtype=float) - self.a) / (self.b - self.a)

    def d(self, s):
        u = self._u(s)
        lam, k = self.lam, self.kappa
        up = (1 + k) * smoothstep(u / lam)
        down = 1 + k * (1 - smoothstep((u - 1 + lam) / lam))
        out = np.where(u <= lam, up, np.where(u < 1 - lam, 1 + k, down))
        return np.where(u <= 0, 0.0, np.where(u >= 1, 1.0, out))

    def __call__(self, s):
        u = self._u(s)
        lam, k = self.lam, self.kappa
        uc = np.clip(u, 0.0, 1.0)
        G = ((1 + k) * lam * smoothstep_int(uc / lam)
             + (1 + k) * np.clip(uc - lam, 0.0, 1 - 2 * lam)
             + np.clip(uc - 1 + lam, 0.0, lam)
             + k * (np.clip(uc - 1 + lam, 0.0, lam) - lam * smoothstep_int((uc - 1 + lam) / lam)))
        inside = self.a + (self.b - self.a) * G
        s = np.asarray(s, dtype=float)
        return np.where(u <= 0, self.a, np.where(u >= 1, s, inside))

    @property
    def max_slope(self) -> float:
        return 1.0 + self.kappa


@dataclass
class Reparametrized:
    model: HamiltonianModel
    base: HamiltonianModel
    rho: Rho
    alpha: float
    eta: float

    @property
    def shift(self) -> float:
        return self.rho.a


def reparametrize(model: HamiltonianModel, alpha: float, eta: float, m0: float | None = None) -> Reparametrized:
    """H1 = rho o H0 - a with a = m(H0) - alpha, so that m(H1) = alpha and H1 = 0 on {H0 <= a}."""
    m0 = float(m0 if m0 is not None else (model.m_closed_form if model.m_closed_form is not None
                                          else max_value(model)))
    if not 0 < alpha <= m0 + 1e-12:
        raise AlphaTooLarge(f"need 0 < alpha <= m(H0) = {m0:g}, got {alpha:g}")
    if eta <= 0:
        raise InfeasibleRho("eta must be positive")
    if alpha >= m0 - 1e-12:
        rho = Rho(0.0, 1.0, eta)  # unused: identity
        ident = HamiltonianModel(model.dim, model.family, dict(model.params), model.lagrangian, model.value,
                                 model.gradient, model.extent, model.m_closed_form, f"{model.name}|alpha={alpha:g}",
                                 dict(model.info))
        return Reparametrized(ident, model, rho, alpha, eta)
    a = m0 - alpha
    b = m0 - alpha / 2.0
    rho = Rho(a, b, eta)

    def value(z):
        return rho(model.value(z)) - a

    def gradient(z):
        return rho.d(model.value(z))[:, None] * model.gradient(z)

    info = {k: v for k, v in model.info.items() if k != "profile"}
    info["base_profile"] = model.info.get("profile")
    new = HamiltonianModel(model.dim, f"{model.family}-reparam", dict(model.params, alpha=alpha, eta=eta),
                           model.lagrangian, value, gradient, model.extent, alpha,
                           f"{model.name}|alpha={alpha:g}", info)
    return Reparametrized(new, model, rho, alpha, eta)


@dataclass
class ReparamCheck:
    alpha: float
    m_H1: float
    zero_region_max: float  # max |H1| on grid points with H0 <= a
    field_error: float  # max |X_H1 - rho'(H0) X_H0| by central differences
    sup_dH1: float
    sup_bound: float
    image_distance: float
    rho_checks: dict[str, bool]

    @property
    def ok(self) -> bool:
        return (abs(self.m_H1 - self.alpha) <= 1e-9 and self.zero_region_max == 0.0
                and self.sup_dH1 <= self.sup_bound + 1e-12 and all(self.rho_checks.values()))

    def lines(self) -> list[str]:
        return [f"reparametrization alpha = {self.alpha:g}",
                f"  m(H1)                 {self.m_H1:.12g}",
                f"  max |H1| on H0 <= a   {self.zero_region_max:.3g}",
                f"  |X_H1 - rho' X_H0|    {self.field_error:.3g}",
                f"  sup |dH1|             {self.sup_dH1:.6g} <= {self.sup_bound:.6g}",
                f"  image distance        {self.image_distance:.3g}",
                f"  rho conditions        {'pass' if all(self.rho_checks.values()) else self.rho_checks}"]


def verify_reparametrization(rep: Reparametrized, grid: int = 81, samples: int = 4,
                             flow_time: float = 1.0, config: IntegratorConfig | None = None) -> ReparamCheck:
    base, new, rho = rep.base, rep.model, rep.rho
    cfg = config or IntegratorConfig(step=2e-4)
    box = [(-base.extent, base.extent)] * base.dim
    pts = grid_points(box, grid)
    H0 = base.H(pts)
    H1 = new.H(pts)
    low = H0 <= rho.a
    zero_max = float(np.max(np.abs(H1[low]))) if low.any() else 0.0
    m_H1 = float(new.H(np.zeros((1, base.dim)))[0]) if base.family in ("radial", "weinstein") \
        else max_value(new)
    # X_H1 = rho'(H0) X_H0, with the gradient of H1 taken by central differences
    hstep = 1e-6
    sel = pts[np.argsort(-np.abs(H0 - 0.5 * (rho.a + rho.b)))[-200:]]
    fd = np.zeros_like(sel)
    for k in range(base.dim):
        e = np.zeros(base.dim)
        e[k] = hstep
        fd[:, k] = (new.H(sel + e) - new.H(sel - e)) / (2 * hstep)
    pred = rho.d(base.H(sel))[:, None] * base.gradient(sel)
    field_err = float(np.max(np.abs(fd - pred)))
    g1 = np.linalg.norm(new.gradient(pts), axis=1)
    g0 = np.linalg.norm(base.gradient(pts), axis=1)
    region = H0 >= rho.a
    sup1 = float(g1.max())
    bound = (1 + rep.eta) * float(g0[region].max()) if region.any() else 0.0
    # trajectory images: H1 at time t equals H0 at time rho'(H0(z0)) t on the level set
    cand = pts[(H0 > rho.a) & (H0 < base.H(np.zeros((1, base.dim)))[0]) & (np.abs(base.lagrangian.defining(pts)).max(axis=1) < 1e-12)]
    if cand.shape[0] == 0:
        cand = pts[(H0 > rho.a) & (g0 > 0)]
    dist = 0.0
    if cand.shape[0]:
        idx = np.linspace(0, cand.shape[0] - 1, min(samples, cand.shape[0])).astype(int)
        z1 = cand[idx].copy()
        z2 = cand[idx].copy()
        c = rho.d(base.H(z2))
        for _ in range(max(1, math.ceil(flow_time / cfg.step))):
            z1 = midpoint_step(new, z1, cfg.step, cfg)
            z2 = midpoint_step(base, z2, c * cfg.step, cfg)
            dist = max(dist, float(np.max(np.abs(z1 - z2))))
    checks = {
        "rho = a below a": bool(np.all(rho(np.linspace(rho.a - 1, rho.a, 11)) == rho.a)),
        "rho = s above b": bool(np.allclose(rho(np.linspace(rho.b, rho.b + 1, 11)), np.linspace(rho.b, rho.b + 1, 11),
                                            atol=1e-12, rtol=0)),
        "rho' <= 1 + eta": bool(np.all(rho.d(np.linspace(rho.a, rho.b, 2001)) <= 1 + rep.eta)),
        "rho' > 0 above a": bool(np.all(rho.d(np.linspace(rho.a, rho.b, 2001)[1:]) > 0)),
    }
    return ReparamCheck(rep.alpha, m_H1, zero_max, field_err, sup1, bound, dist, checks)


# -- radial capacity lower bound -------------------------------------------------------

@dataclass
class CapacityBound:
    radius: float
    fraction: float
    value: float
    upper: float  # (pi/2) R^2
    smoothing_loss: float
    report: AdmissibilityReport
    model: HamiltonianModel

    def lines(self) -> list[str]:
        out = [f"radial capacity lower bound, radius {self.radius:g}, slope fraction {self.fraction:g}",
               f"  m(H)              {self.value:.10g}",
               f"  (pi/2) R^2        {self.upper:.10g}",
               f"  slope-cap loss    {self.upper * (1 - self.fraction):.6g}",
               f"  smoothing loss    {self.smoothing_loss:.6g}"]
        return out + ["  " + ln for ln in self.report.lines()]


def radial_profile_for(radius: float, fraction: float) -> RadialProfile:
    """Single ramp on [0.005 R^2, R^2] with |h'| <= fraction * pi/2 and ramp width 0.01 R^2."""
    if not 0 < fraction < 1:
        raise ValueError("slope_cap_fraction must lie in (0, 1)")
    if radius <= 0:
        raise ValueError("radius must be positive")
    r2 = radius * radius
    return RadialProfile.single(0.005 * r2, r2, fraction * math.pi / 2, 0.01 * r2)


def radial_capacity_lower_bound(radius: float, slope_cap_fraction: float, grid: int = 64,
                                config: IntegratorConfig | None = None, n: int = 1) -> CapacityBound:
    profile = radial_profile_for(radius, slope_cap_fraction)
    model = radial_model(profile, n, f"radial-R{radius:g}-f{slope_cap_fraction:g}")
    eta = 0.5 * (1.0 / slope_cap_fraction - 1.0)
    rep = check_admissible(model, eta, grid, config)
    value = profile.maximum
    s = profile.max_slope
    seg = profile.segments[0]
    loss = s * (seg.start + profile.ramp)
    return CapacityBound(radius, slope_cap_fraction, value, math.pi / 2 * radius ** 2, loss, rep, model)


# -- extensions: chord correspondences ----------------------------------------------------

@dataclass
class CorrespondenceCheck:
    pairs: int
    max_time_error: float
    unmatched: int
    fixed_factor_drift: float

    @property
    def ok(self) -> bool:
        return self.unmatched == 0 and self.max_time_error < 1e-6 and self.fixed_factor_drift < 1e-12


def product_chord_correspondence(product: HamiltonianModel, factor: HamiltonianModel, t_max: float,
                                 grid: int = 16, config: IntegratorConfig | None = None) -> CorrespondenceCheck:
    """Chords of H~ from S_eps x R^k match chords t -> (p, x(t)) of H from R^k."""
    n = product.n
    r = product.lagrangian.factors[0]
    fseeds = factor.lagrangian.seeds(grid, factor.extent)
    angles = np.linspace(0, 2 * np.pi, 4, endpoint=False)
    seeds = []
    for th in angles:
        for s in fseeds:
            z = np.zeros(2 * n)
            z[0], z[n] = r * math.cos(th), r * math.sin(th)
            z[1:n], z[n + 1:] = s[: n - 1], s[n - 1:]
            seeds.append(z)
    seeds = np.array(seeds)
    pc = chord_scan(product, t_max, config=config, seeds=seeds)
    fc = chord_scan(factor, t_max, config=config, seeds=fseeds)
    by_seed = {tuple(np.round(c.start, 12)): c for c in fc}
    err, unmatched, drift = 0.0, 0, 0.0
    for c in pc:
        xs = np.concatenate([c.start[1:n], c.start[n + 1:]])
        f = by_seed.get(tuple(np.round(xs, 12)))
        if f is None or f.constant != c.constant:
            unmatched += 1
            continue
        if not c.constant:
            err = max(err, abs(c.return_time - f.return_time))
            drift = max(drift, abs(c.end[0] - c.start[0]), abs(c.end[n] - c.start[n]))
    matched_moving = sum(1 for c in pc if not c.constant)
    unmatched += abs(matched_moving - sum(1 for c in fc if not c.constant) * len(angles))
    return CorrespondenceCheck(len(pc), err, unmatched, drift)


def weinstein_chords_are_constant(model: HamiltonianModel, t_max: float, grid: int = 32,
                                  config: IntegratorConfig | None = None) -> tuple[bool, int]:
    """Every chord of f~ from the zero section with T <= t_max starts at a critical point of f."""
    chords = chord_scan(model, t_max, grid, config)
    moving = [c for c in chords if not c.constant]
    return (not moving, sum(1 for c in chords if c.constant))


def energy_drift(model: HamiltonianModel, z0, T: float = 1.0, config: IntegratorConfig | None = None) -> float:
    return flow(model, z0, T, config).drift_per_unit_time
