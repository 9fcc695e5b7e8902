"""Independent oracles: dense GF(2) elimination over explicitly enumerated monomials.

Nothing here calls the reduction code under test; only the raw generator and
differential data of a complex are read.
"""

from __future__ import annotations

import math

import numpy as np


def dense_rank_gf2(mat: np.ndarray) -> int:
    """Row-echelon rank over GF(2) of a 0/1 matrix."""
    a = (np.asarray(mat, dtype=np.uint8) & 1).copy()
    rows, cols = a.shape if a.ndim == 2 else (0, 0)
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i, c]), None)
        if piv is None:
            continue
        a[[r, piv]] = a[[piv, r]]
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] ^= a[r]
        r += 1
        if r == rows:
            break
    return r


def window_monomials(cx, a: float, b: float) -> list[tuple[str, int, int, float]]:
    """(id, r, degree, action) of every x t^r with a < action < b, by exhaustive scan of r."""
    a0, N = cx.params.a0, cx.params.N_L
    out = []
    for g in cx.generators:
        span = math.ceil((abs(g.action) + abs(a) + abs(b)) / a0) + 3
        for r in range(-span, span + 1):
            act = g.action - r * a0
            if a < act < b:
                out.append((g.id, r, g.degree - r * N, act))
    return out


def brute_window_ranks(cx, a: float, b: float) -> dict[int, int]:
    """Betti numbers of CF^{<b}/CF^{<=a} from dense boundary matrices per degree."""
    monos = window_monomials(cx, a, b)
    by_deg: dict[int, list[tuple[str, int]]] = {}
    for gid, r, d, _ in monos:
        by_deg.setdefault(d, []).append((gid, r))

    def boundary_rank(d: int) -> int:
        src, tgt = by_deg.get(d, []), by_deg.get(d - 1, [])
        if not src or not tgt:
            return 0
        tidx = {m: i for i, m in enumerate(tgt)}
        mat = np.zeros((len(tgt), len(src)), dtype=np.uint8)
        for j, (gid, r) in enumerate(src):
            for y, coeff in cx.diff.get(gid, {}).items():
                for s in coeff.exponents:
                    i = tidx.get((y, r + s))
                    if i is not None:
                        mat[i, j] ^= 1
        return dense_rank_gf2(mat)

    ranks = {}
    for d in sorted(by_deg):
        k = len(by_deg[d]) - boundary_rank(d) - boundary_rank(d + 1)
        if k:
            ranks[d] = k
    return ranks


def laurent_mul_naive(p: set[int], q: set[int]) -> set[int]:
    """Product in Z/2[t, t^-1] of exponent sets by counting parities."""
    counts: dict[int, int] = {}
    for i in p:
        for j in q:
            counts[i + j] = counts.get(i + j, 0) + 1
    return {k for k, c in counts.items() if c % 2}


def radial_return_time(dh: float) -> float:
    """Closed-form return time to R^n for H = h(|z|^2): each coordinate rotates at speed 2|h'|."""
    return math.pi / (2.0 * abs(dh))
