"""Bit-packed GF(2) linear algebra.

Vectors are Python ints: bit i set <=> coordinate i is 1.  The "low" of a
column is its highest set bit (the latest element in filtration order).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def low(v: int) -> int:
    return v.bit_length() - 1


def bits(v: int) -> list[int]:
    out = []
    while v:
        b = v & -v
        out.append(b.bit_length() - 1)
        v ^= b
    return out


@dataclass
class Reduction:
    """Standard persistence column reduction R = D V."""

    R: list[int]
    V: list[int]
    pivot_of_low: dict[int, int]  # low row -> column index owning it

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return sorted((lw, j) for lw, j in self.pivot_of_low.items())

    def essential(self) -> list[int]:
        """Columns that are cycles and never killed."""
        killed = set(self.pivot_of_low)
        return [j for j, r in enumerate(self.R) if r == 0 and j not in killed]


def reduce_columns(cols: list[int]) -> Reduction:
    R = list(cols)
    V = [1 << j for j in range(len(cols))]
    pivot: dict[int, int] = {}
    for j in range(len(R)):
        while R[j]:
            lw = low(R[j])
            k = pivot.get(lw)
            if k is None:
                pivot[lw] = j
                break
            R[j] ^= R[k]
            V[j] ^= V[k]
    return Reduction(R, V, pivot)


def rank(rows: list[int]) -> int:
    """Rank of a set of bit vectors."""
    basis: dict[int, int] = {}
    r = 0
    for v in rows:
        while v:
            lw = low(v)
            if lw in basis:
                v ^= basis[lw]
            else:
                basis[lw] = v
                r += 1
                break
    return r


def matrix_rank(mat: np.ndarray) -> int:
    mat = np.asarray(mat, dtype=np.uint8) & 1
    if mat.size == 0:
        return 0
    return rank([int("".join(map(str, row[::-1])), 2) if row.any() else 0 for row in mat])


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    if a.shape[1] == 0 or b.shape[0] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.uint8)
    return ((a @ b) % 2).astype(np.uint8)


def is_invertible(mat: np.ndarray) -> bool:
    mat = np.asarray(mat)
    return mat.shape[0] == mat.shape[1] and matrix_rank(mat) == mat.shape[0]


class EliminationBasis:
    """Incremental basis with distinct lows, tracking tags of the vectors combined.

    Used to solve ``v = sum of basis vectors`` and read off which tagged vectors
    were used.
    """

    def __init__(self):
        self._vec: dict[int, int] = {}
        self._tag: dict[int, int] = {}

    def add(self, v: int, tag: int = 0) -> bool:
        while v:
            lw = low(v)
            if lw not in self._vec:
                self._vec[lw] = v
                self._tag[lw] = tag
                return True
            v ^= self._vec[lw]
            tag ^= self._tag[lw]
        return False

    def solve(self, v: int) -> int | None:
        """Tag mask of a combination summing to v, or None if v is not in the span."""
        tag = 0
        while v:
            lw = low(v)
            if lw not in self._vec:
                return None
            v ^= self._vec[lw]
            tag ^= self._tag[lw]
        return tag

    def __len__(self):
        return len(self._vec)
