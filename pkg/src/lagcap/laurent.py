"""Laurent polynomials over Z/2 and monomial grading/action bookkeeping."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

# Global comparison tolerance for actions (spectrum membership, ties).
ACTION_EPS = 1e-9


@dataclass(frozen=True)
class LaurentGF2:
    """Element of Z/2[t, t^-1], stored as the sorted tuple of exponents with coefficient 1."""

    exponents: tuple[int, ...] = ()

    def __post_init__(self):
        exps = self.exponents
        if not isinstance(exps, tuple) or list(exps) != sorted(set(exps)):
            parity = Counter(int(e) for e in exps)
            canon = tuple(sorted(e for e, c in parity.items() if c % 2))
            object.__setattr__(self, "exponents", canon)

    @classmethod
    def from_terms(cls, exponents: Iterable[int]) -> "LaurentGF2":
        """Sum of t^k over the given exponents; repeated exponents cancel in pairs."""
        return cls(tuple(exponents))

    @classmethod
    def monomial(cls, k: int) -> "LaurentGF2":
        return cls((int(k),))

    @classmethod
    def zero(cls) -> "LaurentGF2":
        return cls(())

    @classmethod
    def one(cls) -> "LaurentGF2":
        return cls((0,))

    def is_zero(self) -> bool:
        return not self.exponents

    def __bool__(self):
        return bool(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __add__(self, other: "LaurentGF2") -> "LaurentGF2":
        return LaurentGF2(tuple(sorted(set(self.exponents) ^ set(other.exponents))))

    __sub__ = __add__

    def __neg__(self):
        return self

    def __mul__(self, other: "LaurentGF2") -> "LaurentGF2":
        parity: Counter = Counter()
        for a in self.exponents:
            for b in other.exponents:
                parity[a + b] += 1
        return LaurentGF2(tuple(sorted(e for e, c in parity.items() if c % 2)))

    def shift(self, k: int) -> "LaurentGF2":
        """Multiply by t^k."""
        return LaurentGF2(tuple(e + k for e in self.exponents))

    def inverse(self) -> "LaurentGF2":
        """Inverse of a unit; only monomials are units in this ring."""
        if len(self.exponents) != 1:
            raise ZeroDivisionError(f"{self} is not a unit")
        return LaurentGF2.monomial(-self.exponents[0])

    def __str__(self):
        if not self.exponents:
            return "0"

        def term(k):
            if k == 0:
                return "1"
            if k == 1:
                return "t"
            return f"t^{k}"

        return " + ".join(term(k) for k in self.exponents)


def lp_add(p: LaurentGF2, q: LaurentGF2) -> LaurentGF2:
    return p + q


def lp_mul(p: LaurentGF2, q: LaurentGF2) -> LaurentGF2:
    return p * q


@dataclass(frozen=True)
class GradingParams:
    """Minimal Maslov number ``N_L`` and monotonicity constant ``tau``.

    ``a0 = tau * N_L`` is the area of a minimal-Maslov disk; it is always derived.
    """

    N_L: int
    tau: float
    a0: float = field(init=False)

    def __post_init__(self):
        if int(self.N_L) != self.N_L or self.N_L < 2:
            raise ValueError(f"N_L must be an integer >= 2, got {self.N_L!r}")
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        object.__setattr__(self, "N_L", int(self.N_L))
        object.__setattr__(self, "tau", float(self.tau))
        object.__setattr__(self, "a0", self.tau * self.N_L)


def monomial_degree(gen_degree: int, r: int, params: GradingParams) -> int:
    """Degree of ``x t^r``: |x| - r N_L."""
    return gen_degree - r * params.N_L


def monomial_action(gen_action: float, r: int, params: GradingParams) -> float:
    """Action of ``x t^r``: A(x) - r a0."""
    return gen_action - r * params.a0
