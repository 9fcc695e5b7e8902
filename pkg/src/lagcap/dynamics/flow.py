"""Implicit-midpoint flow, L-crossing detection and chord scans."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import StepFailure
from .models import HamiltonianModel

EPS_CHORD = 1e-6
GRAD_TOL = 1e-10


@dataclass
class IntegratorConfig:
    step: float = 1e-3
    bisect_tol: float = 1e-10
    richardson: bool = True  # combine step h and h/2 return times (error expansion is even in h)
    max_iter: int = 50
    tol: float = 1e-14


def midpoint_step(model: HamiltonianModel, z: np.ndarray, h, cfg: IntegratorConfig) -> np.ndarray:
    """One implicit-midpoint step z -> z' with z' = z + h X((z + z')/2); ``h`` may be per-row."""
    h = np.asarray(h, dtype=float)
    if h.ndim == 1:
        h = h[:, None]
    znew = z + h * model.vector_field(z)
    for _ in range(cfg.max_iter):
        nxt = z + h * model.vector_field(0.5 * (z + znew))
        err = np.max(np.abs(nxt - znew)) if nxt.size else 0.0
        znew = nxt
        if err <= cfg.tol * max(1.0, float(np.max(np.abs(z))) if z.size else 1.0):
            return znew
    raise StepFailure(f"implicit midpoint fixed point did not converge in {cfg.max_iter} iterations (step {h.max():g})")


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # (K, 2n)
    energy: np.ndarray

    @property
    def energy_drift(self) -> float:
        return float(np.max(np.abs(self.energy - self.energy[0])))

    @property
    def drift_per_unit_time(self) -> float:
        T = float(self.times[-1] - self.times[0])
        return self.energy_drift / max(T, 1.0)


def flow(model: HamiltonianModel, z0, T: float, config: IntegratorConfig | None = None) -> Trajectory:
    cfg = config or IntegratorConfig()
    z = np.atleast_2d(np.asarray(z0, dtype=float)).copy()
    nsteps = max(1, math.ceil(T / cfg.step - 1e-9))
    h = T / nsteps
    states = [z[0].copy()]
    for _ in range(nsteps):
        z = midpoint_step(model, z, h, cfg)
        states.append(z[0].copy())
    S = np.array(states)
    return Trajectory(np.linspace(0.0, T, nsteps + 1), S, model.H(S))


@dataclass
class Chord:
    start: np.ndarray
    return_time: float | None  # None for constant chords
    end: np.ndarray
    classification: str  # constant | nonconstant
    samples: np.ndarray | None = None
    raw_times: tuple = field(default_factory=tuple)  # (T_h, T_{h/2}) before extrapolation

    @property
    def constant(self) -> bool:
        return self.classification == "constant"


def _first_returns(model: HamiltonianModel, seeds: np.ndarray, t_max: float, step: float,
                   cfg: IntegratorConfig):
    """First nontrivial return time to L of each seed (nan if none up to t_max)."""
    lag = model.lagrangian
    N = seeds.shape[0]
    T = np.full(N, np.nan)
    ends = np.full_like(seeds, np.nan)
    if N == 0:
        return T, ends
    # most transverse defining function at the start
    gdot = np.einsum("nkd,nd->nk", lag.defining_grad(seeds), model.vector_field(seeds))
    key = np.argmax(np.abs(gdot), axis=1)
    rows = np.arange(N)
    z = seeds.copy()
    g_prev = lag.defining(z)[rows, key]
    active = np.ones(N, dtype=bool)
    nsteps = math.ceil(t_max / step) + 1
    for k in range(nsteps):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        znew = midpoint_step(model, z[idx], step, cfg)
        g_new = lag.defining(znew)[np.arange(idx.size), key[idx]]
        if k == 0:
            # leaving L: the sign after the first step is the reference
            z[idx] = znew
            g_prev[idx] = g_new
            continue
        crossed = (np.sign(g_new) != np.sign(g_prev[idx])) | (g_new == 0)
        for ii in np.nonzero(crossed)[0]:
            i = idx[ii]
            s, zc = _bisect(model, z[i], step, key[i], cfg)
            if np.all(np.abs(lag.defining(zc)[0]) < EPS_CHORD):
                T[i] = k * step + s
                ends[i] = zc[0]
                active[i] = False
        z[idx] = znew
        g_prev[idx] = g_new
    return T, ends


def _bisect(model, z, step, j, cfg):
    lag = model.lagrangian
    z = z[None, :]
    g0 = lag.defining(z)[0, j]
    lo, hi = 0.0, step
    zhi = midpoint_step(model, z, hi, cfg)
    while hi - lo > cfg.bisect_tol:
        mid = 0.5 * (lo + hi)
        zm = midpoint_step(model, z, mid, cfg)
        gm = lag.defining(zm)[0, j]
        if gm == 0:
            return mid, zm
        if np.sign(gm) == np.sign(g0):
            lo = mid
        else:
            hi, zhi = mid, zm
    return hi, zhi


def chord_scan(model: HamiltonianModel, t_max: float, grid: int = 64,
               config: IntegratorConfig | None = None, seeds: np.ndarray | None = None) -> list[Chord]:
    """Chords starting on a seed grid of L with return time <= t_max, plus constant chords."""
    cfg = config or IntegratorConfig()
    if seeds is None:
        seeds = model.lagrangian.seeds(grid, model.extent)
    seeds = np.atleast_2d(np.asarray(seeds, dtype=float))
    gnorm = np.linalg.norm(model.gradient(seeds), axis=1)
    const = gnorm <= GRAD_TOL
    chords: list[Chord] = []
    moving = seeds[~const]
    margin = 10 * cfg.step
    T1, E1 = _first_returns(model, moving, t_max + margin, cfg.step, cfg)
    T = T1.copy()
    raw = [(t,) for t in T1]
    if cfg.richardson:
        found = np.nonzero(np.isfinite(T1))[0]
        T2, _ = _first_returns(model, moving[found], t_max + margin, cfg.step / 2, cfg)
        for i, t2 in zip(found, T2):
            if np.isfinite(t2):
                T[i] = (4.0 * t2 - T1[i]) / 3.0
                raw[i] = (T1[i], t2)
    k = 0
    for i, z0 in enumerate(seeds):
        if const[i]:
            chords.append(Chord(z0, None, z0, "constant"))
            continue
        if np.isfinite(T[k]) and T[k] <= t_max:
            chords.append(Chord(z0, float(T[k]), E1[k], "nonconstant", raw_times=raw[k]))
        k += 1
    return chords


def shortest_chord(chords: list[Chord]) -> Chord | None:
    moving = [c for c in chords if not c.constant]
    return min(moving, key=lambda c: c.return_time) if moving else None
