"""Morse and pearl complexes from explicit critical-point data and supplied counts."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .complex import FilteredComplex, Generator, Window, _expect_keys, make_complex, require_valid
from .errors import EndpointIsCriticalValue, FormatError, IndexMismatch, SquareNonzero
from .laurent import ACTION_EPS, GradingParams
from .persistence import WindowHomology, window_homology


@dataclass(frozen=True)
class CriticalPoint:
    id: str
    index: int
    value: float


@dataclass
class MorseData:
    critical_points: list[CriticalPoint]
    morse_diff: dict[str, list[str]]  # x -> ys with odd trajectory count
    manifold_dim: int
    ball_maximum: bool = False  # declared: the top cluster sits over a closed ball
    name: str = ""

    def __post_init__(self):
        self._by_id = {c.id: c for c in self.critical_points}
        if len(self._by_id) != len(self.critical_points):
            raise FormatError("duplicate critical point id")
        for c in self.critical_points:
            if not 0 <= c.index <= self.manifold_dim:
                raise IndexMismatch(f"{c.id}: index {c.index} outside [0, {self.manifold_dim}]")
        for x, ys in self.morse_diff.items():
            for y in ys:
                if x not in self._by_id or y not in self._by_id:
                    raise FormatError(f"morse_diff {x} -> {y}: unknown critical point")
                if self._by_id[x].index - self._by_id[y].index != 1:
                    raise IndexMismatch(f"trajectory count {x} -> {y} between indices "
                                        f"{self._by_id[x].index} and {self._by_id[y].index}")
        for x in self.morse_diff:
            twice: dict[str, int] = {}
            for y in self._odd(x):
                for z in self._odd(y):
                    twice[z] = twice.get(z, 0) ^ 1
            if any(twice.values()):
                raise SquareNonzero(f"Morse differential squares to a nonzero chain at {x}", generator=x)

    def _odd(self, x) -> list[str]:
        out: dict[str, int] = {}
        for y in self.morse_diff.get(x, ()):
            out[y] = out.get(y, 0) ^ 1
        return sorted(y for y, c in out.items() if c)

    def point(self, cid: str) -> CriticalPoint:
        return self._by_id[cid]

    @property
    def critical_values(self) -> list[float]:
        return sorted({c.value for c in self.critical_points})


@dataclass
class DiskTerm:
    source: str
    target: str
    r: int
    count: int = 1


@dataclass
class PearlData:
    morse: MorseData
    disk_terms: list[DiskTerm] = field(default_factory=list)


def _generators(md: MorseData, mode: str | float) -> list[Generator]:
    gens = []
    for c in md.critical_points:
        act = c.value if mode == "value" else float(mode)
        gens.append(Generator(c.id, c.index, act, "critical-point"))
    return gens


def build_morse_complex(md: MorseData, params: GradingParams, mode: str | float = "value") -> FilteredComplex:
    """Morse complex; actions are critical values, or the constant ``mode`` for the A_c convention."""
    terms = {x: [(y, 0) for y in md._odd(x)] for x in md.morse_diff}
    return require_valid(make_complex(params, _generators(md, mode), terms, md.name))


def build_pearl_complex(pd: PearlData, params: GradingParams, mode: str | float = "value") -> FilteredComplex:
    md = pd.morse
    terms: dict[str, list] = {x: [(y, 0) for y in md._odd(x)] for x in md.morse_diff}
    for dt in pd.disk_terms:
        if dt.r < 1:
            raise IndexMismatch(f"disk term {dt.source} -> {dt.target}: exponent must be positive")
        x, y = md.point(dt.source), md.point(dt.target)
        if x.index - y.index + dt.r * params.N_L - 1 != 0:
            raise IndexMismatch(f"disk term {dt.source} -> {dt.target} t^{dt.r}: index "
                                f"{x.index} - {y.index} + {dt.r * params.N_L} - 1 != 0")
        if dt.count % 2:
            terms.setdefault(dt.source, []).append((dt.target, dt.r))
    return require_valid(make_complex(params, _generators(md, mode), terms, md.name))


def window_morse_homology(md: MorseData, w: Window) -> WindowHomology:
    """Filtered Morse homology H^(a,b): the complex has no t, so the window is taken on r = 0 only."""
    for end in (w.a, w.b):
        for v in md.critical_values:
            if abs(end - v) <= ACTION_EPS:
                raise EndpointIsCriticalValue(f"window endpoint {end:g} is the critical value of a critical point")
    # With no disk terms, a huge a0 keeps every t-shift out of any bounded window.
    spread = max((abs(v) for v in md.critical_values), default=0.0) + abs(w.a) + abs(w.b) + 1.0
    params = GradingParams(md.manifold_dim + 2, 4.0 * spread / (md.manifold_dim + 2))
    return window_homology(build_morse_complex(md, params), w)


def morse_homology(md: MorseData) -> dict[int, int]:
    """Unfiltered Morse homology ranks (Z/2 Betti numbers)."""
    lo = min(md.critical_values) - 1.0
    hi = max(md.critical_values) + 1.0
    return window_morse_homology(md, Window(lo, hi)).ranks


# -- JSON -----------------------------------------------------------------------

def morse_from_dict(obj) -> MorseData:
    _expect_keys(obj, {"critical_points", "morse_diff", "manifold_dim", "ball_maximum", "name"},
                 {"critical_points", "manifold_dim"}, "morse")
    cps = []
    for i, c in enumerate(obj["critical_points"]):
        _expect_keys(c, {"id", "index", "value"}, {"id", "index", "value"}, f"critical_points[{i}]")
        cps.append(CriticalPoint(str(c["id"]), int(c["index"]), float(c["value"])))
    diff: dict[str, list[str]] = {}
    for i, e in enumerate(obj.get("morse_diff", [])):
        _expect_keys(e, {"from", "to", "count"}, {"from", "to"}, f"morse_diff[{i}]")
        if int(e.get("count", 1)) % 2:
            diff.setdefault(str(e["from"]), []).append(str(e["to"]))
        else:
            diff.setdefault(str(e["from"]), [])
    return MorseData(cps, diff, int(obj["manifold_dim"]), bool(obj.get("ball_maximum", False)),
                     obj.get("name", ""))


def pearl_from_dict(obj) -> tuple[PearlData, GradingParams, str | float]:
    _expect_keys(obj, {"morse", "disk_terms", "params", "mode", "name", "notes"}, {"morse", "params"}, "pearl")
    md = morse_from_dict(obj["morse"])
    terms = []
    for i, e in enumerate(obj.get("disk_terms", [])):
        _expect_keys(e, {"from", "to", "r", "count"}, {"from", "to", "r"}, f"disk_terms[{i}]")
        terms.append(DiskTerm(str(e["from"]), str(e["to"]), int(e["r"]), int(e.get("count", 1))))
    from .complex import params_from_dict

    return PearlData(md, terms), params_from_dict(obj["params"]), obj.get("mode", "value")


# -- bundled models ------------------------------------------------------------------

def circle_morse(m: float = 0.5) -> MorseData:
    """Height function on S^1: two trajectories from the max to the min cancel mod 2."""
    return MorseData([CriticalPoint("q", 0, 0.0), CriticalPoint("P", 1, m)], {"P": []}, 1, True, "S1")


def sphere_morse(m: float = 0.5) -> MorseData:
    return MorseData([CriticalPoint("min", 0, 0.0), CriticalPoint("max", 2, m)], {}, 2, True, "S2")


def torus_morse(m: float = 0.5) -> MorseData:
    """Perfect Morse function on T^2 with saddle values just above the minimum."""
    cps = [CriticalPoint("min", 0, 0.0), CriticalPoint("s1", 1, 0.01),
           CriticalPoint("s2", 1, 0.02), CriticalPoint("max", 2, m)]
    return MorseData(cps, {"s1": [], "s2": [], "max": []}, 2, True, "T2")


def split_maximum(n: int, k: int, m: float = 1.0, spread: float = 0.05) -> MorseData:
    """Function on S^n whose top cluster over a ball has k maxima joined by k-1 saddles.

    Within the cluster the saddle s_i connects maxima M_i and M_{i+1}; the homology of
    the cluster window is Z/2[n].
    """
    if n < 1 or k < 1:
        raise ValueError("need n >= 1 and k >= 1")
    cps = [CriticalPoint("min", 0, 0.0)]
    diff: dict[str, list[str]] = {}
    for i in range(k):
        cps.append(CriticalPoint(f"M{i}", n, m - spread * i / max(k, 1)))
    for i in range(k - 1):
        cps.append(CriticalPoint(f"s{i}", n - 1, m - spread * (1 + i / max(k, 1))))
        diff.setdefault(f"M{i}", []).append(f"s{i}")
        diff.setdefault(f"M{i + 1}", []).append(f"s{i}")
    if n == 1:
        # on S^1 the outer maxima also flow down to the global minimum
        diff.setdefault("M0", []).append("min")
        diff.setdefault(f"M{k - 1}", []).append("min")
    return MorseData(cps, diff, n, True, f"S{n}-split{k}")


def circle_pearl(m: float = 0.0) -> PearlData:
    """Circle in the plane: the Maslov-2 disk term m -> M t is forced by displaceability and degree."""
    md = MorseData([CriticalPoint("m", 0, m), CriticalPoint("M", 1, m)], {"M": []}, 1, True, "C1")
    return PearlData(md, [DiskTerm("m", "M", 1, 1)])


def critical_points_below(md: MorseData, a: float) -> Iterable[CriticalPoint]:
    return (c for c in md.critical_points if c.value < a)
