"""Closed-form Hamiltonians on model phase spaces R^{2n} with a distinguished Lagrangian.

Coordinates are z = (x_1..x_n, y_1..y_n), w_j = x_j + i y_j, omega = sum dx_j ^ dy_j
and omega(X_H, .) = -dH, so that x' = -dH/dy and y' = dH/dx.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from ..complex import _expect_keys
from ..errors import FormatError, ProfileInvalid
from .expr import compile_expression


def smoothstep(v):
    """Quintic 6v^5 - 15v^4 + 10v^3 clipped to [0, 1]; C^2 at both ends."""
    v = np.clip(v, 0.0, 1.0)
    return v * v * v * (v * (6.0 * v - 15.0) + 10.0)


def smoothstep_d(v):
    inside = (v > 0.0) & (v < 1.0)
    v = np.clip(v, 0.0, 1.0)
    return np.where(inside, 30.0 * v * v * (v - 1.0) ** 2, 0.0)


def smoothstep_int(v):
    """int_0^v smoothstep, for v clipped to [0, 1] (equals 1/2 at v = 1)."""
    v = np.clip(v, 0.0, 1.0)
    return v ** 4 * (v * (v - 3.0) + 2.5)


# -- radial profiles ------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    start: float
    end: float
    slope: float  # |h'| on the flat part of the ramp-down


@dataclass(frozen=True)
class RadialProfile:
    """h(rho) with h' = -sum_j slope_j B_j(rho), B_j a smoothed indicator of [start_j, end_j].

    Each B_j rises over [start, start + ramp] and falls over [end - ramp, end]
    with the quintic smoothstep, so h is C^3 and h = 0 for rho >= last end.
    """

    segments: tuple[Segment, ...]
    ramp: float

    def __post_init__(self):
        segs = tuple(Segment(float(s.start), float(s.end), float(s.slope)) for s in self.segments)
        object.__setattr__(self, "segments", segs)
        if self.ramp <= 0:
            raise ProfileInvalid("ramp width must be positive")
        prev = -math.inf
        for s in segs:
            if s.start < 0 or s.end - s.start < 2 * self.ramp - 1e-15 or s.start < prev:
                raise ProfileInvalid(f"segment [{s.start}, {s.end}] invalid (ramp {self.ramp}, previous end {prev})")
            if s.slope <= 0:
                raise ProfileInvalid("segment slopes must be positive (h decreases outward)")
            prev = s.end

    @classmethod
    def single(cls, start: float, end: float, slope: float, ramp: float) -> "RadialProfile":
        return cls((Segment(start, end, slope),), ramp)

    def _bump(self, s: Segment, rho):
        w = self.ramp
        return smoothstep((rho - s.start) / w) - smoothstep((rho - (s.end - w)) / w)

    def _bump_d(self, s: Segment, rho):
        w = self.ramp
        return (smoothstep_d((rho - s.start) / w) - smoothstep_d((rho - (s.end - w)) / w)) / w

    def _bump_int(self, s: Segment, rho):
        """int_{-inf}^rho B."""
        w = self.ramp
        mid = s.end - s.start - 2 * w
        return (w * smoothstep_int((rho - s.start) / w) + np.clip(rho - s.start - w, 0.0, mid)
                + np.clip(rho - (s.end - w), 0.0, w) - w * smoothstep_int((rho - (s.end - w)) / w))

    def h(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for s in self.segments:
            total = s.end - s.start - self.ramp
            out = out + s.slope * (total - self._bump_int(s, rho))
        return np.where(rho >= self.support, 0.0, out)  # exact zero outside the support

    def dh(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for s in self.segments:
            out = out - s.slope * self._bump(s, rho)
        return out

    def d2h(self, rho):
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        for s in self.segments:
            out = out - s.slope * self._bump_d(s, rho)
        return out

    @property
    def maximum(self) -> float:
        return float(self.h(0.0))

    @property
    def max_slope(self) -> float:
        return max((s.slope for s in self.segments), default=0.0)

    @property
    def support(self) -> float:
        """rho beyond which h vanishes identically."""
        return max((s.end for s in self.segments), default=0.0)

    @property
    def plateau(self) -> float:
        """rho up to which h equals its maximum."""
        return min((s.start for s in self.segments), default=math.inf)

    def critical_levels(self) -> list[float]:
        """Values of h on the intervals where h' = 0 (its critical values as a function of rho >= 0)."""
        if not self.segments:
            return [0.0]
        levels = [self.maximum]
        for s, t in zip(self.segments, self.segments[1:]):
            if t.start > s.end - 1e-15:
                levels.append(float(self.h(s.end)))
        levels.append(0.0)
        out: list[float] = []
        for v in levels:
            if all(abs(v - u) > 1e-12 for u in out):
                out.append(v)
        return out

    def scaled(self, c: float) -> "RadialProfile":
        return RadialProfile(tuple(Segment(s.start, s.end, c * s.slope) for s in self.segments), self.ramp)

    def to_dict(self) -> dict:
        return {"segments": [[s.start, s.end, s.slope] for s in self.segments], "ramp": self.ramp}

    @classmethod
    def from_dict(cls, obj) -> "RadialProfile":
        _expect_keys(obj, {"segments", "ramp"}, {"segments", "ramp"}, "profile")
        segs = []
        for i, s in enumerate(obj["segments"]):
            if len(s) != 3:
                raise FormatError(f"profile.segments[{i}]: expected [start, end, slope]")
            segs.append(Segment(*map(float, s)))
        return cls(tuple(segs), float(obj["ramp"]))


# -- Lagrangians ---------------------------------------------------------------------

@dataclass(frozen=True)
class LagrangianModel:
    """Product of per-coordinate factors: ``None`` is the real line y_j = 0, a float r the circle |w_j| = r."""

    factors: tuple[float | None, ...]
    kind: str = "real"

    @property
    def n(self) -> int:
        return len(self.factors)

    def defining(self, z: np.ndarray) -> np.ndarray:
        """Functions vanishing exactly on L, shape (N, n)."""
        z = np.atleast_2d(z)
        n = self.n
        cols = []
        for j, r in enumerate(self.factors):
            x, y = z[:, j], z[:, n + j]
            cols.append(y if r is None else x * x + y * y - r * r)
        return np.stack(cols, axis=-1)

    def defining_grad(self, z: np.ndarray) -> np.ndarray:
        """Gradients of the defining functions, shape (N, n, 2n)."""
        z = np.atleast_2d(z)
        n = self.n
        out = np.zeros((z.shape[0], n, 2 * n))
        for j, r in enumerate(self.factors):
            if r is None:
                out[:, j, n + j] = 1.0
            else:
                out[:, j, j] = 2 * z[:, j]
                out[:, j, n + j] = 2 * z[:, n + j]
        return out

    def seeds(self, grid: int, extent: float) -> np.ndarray:
        """Grid points on L: lines sampled on [-extent, extent], circles by angle."""
        axes = []
        for r in self.factors:
            if r is None:
                axes.append([(x, 0.0) for x in np.linspace(-extent, extent, grid)])
            else:
                th = np.linspace(0.0, 2 * np.pi, grid, endpoint=False)
                axes.append([(r * math.cos(t), r * math.sin(t)) for t in th])
        n = self.n
        pts = []
        for combo in np.array(np.meshgrid(*[np.arange(len(a)) for a in axes], indexing="ij")).reshape(n, -1).T:
            z = np.zeros(2 * n)
            for j, k in enumerate(combo):
                z[j], z[n + j] = axes[j][k]
            pts.append(z)
        return np.array(pts)

    def to_dict(self) -> dict:
        if self.kind == "real":
            return {"kind": "real"}
        if self.kind == "product-circle":
            return {"kind": "product-circle", "radius": self.factors[0]}
        return {"kind": "torus", "radii": list(self.factors)}

    @classmethod
    def from_dict(cls, obj, n: int) -> "LagrangianModel":
        _expect_keys(obj, {"kind", "radius", "radii"}, {"kind"}, "lagrangian")
        kind = obj["kind"]
        if kind == "real":
            return real_lagrangian(n)
        if kind == "product-circle":
            return cls((float(obj["radius"]),) + (None,) * (n - 1), kind)
        if kind == "torus":
            radii = [float(r) for r in obj["radii"]]
            if len(radii) != n:
                raise FormatError(f"torus lagrangian needs {n} radii")
            return cls(tuple(radii), kind)
        raise FormatError(f"unknown lagrangian kind {kind!r}")


def real_lagrangian(n: int) -> LagrangianModel:
    return LagrangianModel((None,) * n, "real")


# -- models ----------------------------------------------------------------------------

Array = np.ndarray


@dataclass
class HamiltonianModel:
    """Autonomous Hamiltonian on R^{2n} given by value/gradient callables on (N, 2n) arrays."""

    dim: int
    family: str  # radial | weinstein | product | custom
    params: dict
    lagrangian: LagrangianModel
    value: Callable[[Array], Array]
    gradient: Callable[[Array], Array]
    extent: float  # every point of the support lies in the box [-extent, extent]^{2n}
    m_closed_form: float | None = None
    name: str = ""
    info: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.dim // 2

    def H(self, z) -> Array:
        return self.value(np.atleast_2d(z))

    def vector_field(self, z) -> Array:
        g = self.gradient(np.atleast_2d(z))
        n = self.n
        return np.concatenate([-g[:, n:], g[:, :n]], axis=1)

    def scaled(self, c: float) -> "HamiltonianModel":
        """c * H, for the scaling property of admissibility."""
        info = dict(self.info)
        if "profile" in info:
            info["profile"] = info["profile"].scaled(c)
        return HamiltonianModel(self.dim, self.family, dict(self.params, scale=c * self.params.get("scale", 1.0)),
                                self.lagrangian, lambda z: c * self.value(z), lambda z: c * self.gradient(z),
                                self.extent, None if self.m_closed_form is None else c * self.m_closed_form,
                                f"{c:g}*{self.name}", info)

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "family": self.family, "params": self.params,
               "lagrangian": self.lagrangian.to_dict()}
        if "expression" in self.info:
            out["expression"] = self.info["expression"]
        return out


def radial_model(profile: RadialProfile, n: int = 1, name: str = "radial") -> HamiltonianModel:
    """H(z) = h(|z|^2) on C^n with L = R^n."""

    def value(z):
        return profile.h(np.sum(z * z, axis=1))

    def gradient(z):
        return 2.0 * profile.dh(np.sum(z * z, axis=1))[:, None] * z

    return HamiltonianModel(2 * n, "radial", {"profile": profile.to_dict()}, real_lagrangian(n), value, gradient,
                            math.sqrt(profile.support) if profile.segments else 1.0, profile.maximum, name,
                            {"profile": profile})


def fiber_cutoff(r: float, R: float) -> tuple[Callable, Callable]:
    """phi(u) = 1 for u <= r, 0 for u >= R, smoothstep in between; and phi'."""
    if not 0 < r < R:
        raise ProfileInvalid(f"need 0 < r < R, got r = {r}, R = {R}")

    def phi(u):
        return 1.0 - smoothstep((np.asarray(u, dtype=float) - r) / (R - r))

    def dphi(u):
        return -smoothstep_d((np.asarray(u, dtype=float) - r) / (R - r)) / (R - r)

    return phi, dphi


def weinstein_extend(profile: RadialProfile, r: float, R: float, n: int = 1,
                     name: str = "weinstein") -> HamiltonianModel:
    """Extension f~(q, p) = phi(|p|) f(q) of f(q) = h(|q|^2) to the cotangent model, L = zero section."""
    phi, dphi = fiber_cutoff(r, R)

    def value(z):
        q, p = z[:, :n], z[:, n:]
        return phi(np.linalg.norm(p, axis=1)) * profile.h(np.sum(q * q, axis=1))

    def gradient(z):
        q, p = z[:, :n], z[:, n:]
        pn = np.linalg.norm(p, axis=1)
        f = profile.h(np.sum(q * q, axis=1))
        gq = (phi(pn) * 2.0 * profile.dh(np.sum(q * q, axis=1)))[:, None] * q
        safe = np.where(pn > 0, pn, 1.0)
        gp = (dphi(pn) * f / safe)[:, None] * p
        return np.concatenate([gq, gp], axis=1)

    ext = max(math.sqrt(profile.support) if profile.segments else 1.0, R)
    return HamiltonianModel(2 * n, "weinstein", {"profile": profile.to_dict(), "r": r, "R": R},
                            real_lagrangian(n), value, gradient, ext, profile.maximum, name,
                            {"profile": profile, "phi": phi})


@dataclass(frozen=True)
class BetaCutoff:
    """Radial cutoff on the P = C factor: 1 for |p|^2 <= inner, 0 for |p|^2 >= outer."""

    inner: float
    outer: float

    def __post_init__(self):
        if not 0 < self.inner < self.outer:
            raise ProfileInvalid("beta cutoff needs 0 < inner < outer")

    def value(self, s):
        return 1.0 - smoothstep((np.asarray(s, dtype=float) - self.inner) / (self.outer - self.inner))

    def d(self, s):
        return -smoothstep_d((np.asarray(s, dtype=float) - self.inner) / (self.outer - self.inner)) \
            / (self.outer - self.inner)


def circle_beta(eps: float) -> BetaCutoff:
    """Cutoff equal to 1 near the circle of area eps and supported in the disk of area 2 eps."""
    return BetaCutoff(1.25 * eps / math.pi, 1.9 * eps / math.pi)


def product_extend(factor: RadialProfile, eps: float, beta: BetaCutoff | None = None,
                   n_factor: int = 1, name: str = "product") -> HamiltonianModel:
    """H~ = (H - m) beta + m on C x C^{n_factor}, with L = S_eps x R^{n_factor}.

    ``beta=None`` means beta == 1, i.e. H~ = H.
    """
    m = factor.maximum
    n = 1 + n_factor
    r = math.sqrt(eps / math.pi)

    def split(z):
        p2 = z[:, 0] ** 2 + z[:, n] ** 2
        xs = np.concatenate([z[:, 1:n], z[:, n + 1:]], axis=1)
        return p2, xs

    def value(z):
        p2, xs = split(z)
        H = factor.h(np.sum(xs * xs, axis=1))
        b = np.ones_like(p2) if beta is None else beta.value(p2)
        return (H - m) * b + m

    def gradient(z):
        p2, xs = split(z)
        rho = np.sum(xs * xs, axis=1)
        H = factor.h(rho)
        b = np.ones_like(p2) if beta is None else beta.value(p2)
        db = np.zeros_like(p2) if beta is None else beta.d(p2)
        g = np.zeros_like(z)
        gx = (b * 2.0 * factor.dh(rho))[:, None] * z
        g[:, 1:n] = gx[:, 1:n]
        g[:, n + 1:] = gx[:, n + 1:]
        g[:, 0] = (H - m) * db * 2 * z[:, 0]
        g[:, n] = (H - m) * db * 2 * z[:, n]
        return g

    lag = LagrangianModel((r,) + (None,) * n_factor, "product-circle")
    ext = max(math.sqrt(factor.support) if factor.segments else 1.0,
              math.sqrt(beta.outer) if beta else 2 * r)
    params = {"factor": factor.to_dict(), "epsilon": eps,
              "beta": None if beta is None else {"inner": beta.inner, "outer": beta.outer}}
    return HamiltonianModel(2 * n, "product", params, lag, value, gradient, ext, m, name,
                            {"profile": factor, "beta": beta, "epsilon": eps})


def custom_model(expression: str, n: int, support_radius: float, lagrangian: LagrangianModel | None = None,
                 name: str = "custom") -> HamiltonianModel:
    """User expression times a bump equal to 1 on |z| <= 0.8 R and 0 beyond R."""
    cf = compile_expression(expression, n)
    R = float(support_radius)
    if R <= 0:
        raise ProfileInvalid("support_radius must be positive")
    inner = (0.8 * R) ** 2
    outer = R * R

    def bump(z):
        return 1.0 - smoothstep((np.sum(z * z, axis=1) - inner) / (outer - inner))

    def dbump(z):
        return (-smoothstep_d((np.sum(z * z, axis=1) - inner) / (outer - inner)) / (outer - inner))[:, None] * 2 * z

    def value(z):
        return cf.value(z) * bump(z)

    def gradient(z):
        return cf.gradient(z) * bump(z)[:, None] + cf.value(z)[:, None] * dbump(z)

    return HamiltonianModel(2 * n, "custom", {"support_radius": R}, lagrangian or real_lagrangian(n),
                            value, gradient, R, None, name, {"expression": expression})


# -- JSON -----------------------------------------------------------------------------

def model_from_dict(obj, name: str = "") -> HamiltonianModel:
    _expect_keys(obj, {"dim", "family", "params", "expression", "lagrangian", "name"},
                 {"dim", "family", "params", "lagrangian"}, "hamiltonian")
    dim = int(obj["dim"])
    if dim < 2 or dim % 2:
        raise FormatError("dim must be an even integer >= 2")
    n = dim // 2
    fam, prm = obj["family"], obj["params"]
    name = name or obj.get("name", fam)
    lag = LagrangianModel.from_dict(obj["lagrangian"], n)
    if fam == "radial":
        _expect_keys(prm, {"profile"}, {"profile"}, "params")
        if lag.kind != "real":
            raise FormatError("radial family uses the real Lagrangian")
        return radial_model(RadialProfile.from_dict(prm["profile"]), n, name)
    if fam == "weinstein":
        _expect_keys(prm, {"profile", "r", "R"}, {"profile", "r", "R"}, "params")
        return weinstein_extend(RadialProfile.from_dict(prm["profile"]), float(prm["r"]), float(prm["R"]), n, name)
    if fam == "product":
        _expect_keys(prm, {"factor", "epsilon", "beta"}, {"factor", "epsilon"}, "params")
        b = prm.get("beta")
        beta = None if b is None else BetaCutoff(float(b["inner"]), float(b["outer"]))
        eps = float(prm["epsilon"])
        if lag.kind != "product-circle" or abs(lag.factors[0] - math.sqrt(eps / math.pi)) > 1e-9:
            raise FormatError(f"product family needs a product-circle Lagrangian of area epsilon = {eps:g}")
        return product_extend(RadialProfile.from_dict(prm["factor"]), float(prm["epsilon"]), beta, n - 1, name)
    if fam == "custom":
        _expect_keys(prm, {"support_radius"}, {"support_radius"}, "params")
        if "expression" not in obj:
            raise FormatError("custom family needs an expression")
        return custom_model(obj["expression"], n, float(prm["support_radius"]), lag, name)
    raise FormatError(f"unknown family {fam!r}")


def load_model_file(path) -> HamiltonianModel:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc
    return model_from_dict(obj, obj.get("name") or path.stem)


def grid_points(bounds: Sequence[tuple[float, float]], n: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, n) for lo, hi in bounds]
    return np.stack([a.ravel() for a in np.meshgrid(*axes, indexing="ij")], axis=-1)
