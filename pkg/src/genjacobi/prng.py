"""Seeded pseudo-random source used by every randomized check.

The generator is a plain 64-bit linear congruential generator so that any
implementation can reproduce a run bit for bit:

    state <- (6364136223846793005 * state + 1442695040888963407) mod 2**64
    output = state >> 32                       (a 32-bit value)
    randint(lo, hi) = lo + output mod (hi - lo + 1)

The initial state is the seed reduced mod 2**64.  Independent streams for
trial ``t`` of a run seeded with ``s`` start from ``derive_seed(s, t)``,
so trials can be evaluated in any order or concurrently.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

from .exactmath import Poly, PolyMatrix

_MULT = 6364136223846793005
_INC = 1442695040888963407
_MOD = 1 << 64
_GOLDEN = 0x9E3779B97F4A7C15


def derive_seed(seed: int, stream: int) -> int:
    return (seed + (stream + 1) * _GOLDEN) % _MOD


class LCG:
    def __init__(self, seed: int):
        self.state = seed % _MOD

    def next_u32(self) -> int:
        self.state = (_MULT * self.state + _INC) % _MOD
        return self.state >> 32

    def randint(self, lo: int, hi: int) -> int:
        """Uniform-ish integer in the closed range [lo, hi]."""
        if hi < lo:
            raise ValueError("empty range")
        return lo + self.next_u32() % (hi - lo + 1)

    def rational(self, bound: int = 9, max_den: int = 5) -> Fraction:
        num = self.randint(-bound, bound)
        den = self.randint(1, max_den)
        return Fraction(num, den)

    def point(self, size: int, bound: int = 9, max_den: int = 5) -> tuple[Fraction, ...]:
        return tuple(self.rational(bound, max_den) for _ in range(size))

    def stream(self, index: int) -> "LCG":
        """A child generator whose seed depends only on the current state and index."""
        return LCG(derive_seed(self.state, index))


def monomials(nvars: int, degree: int) -> list[tuple[int, ...]]:
    """All exponent vectors of total degree <= degree, in a fixed order."""
    out = [e for e in itertools.product(range(degree + 1), repeat=nvars) if sum(e) <= degree]
    out.sort(key=lambda e: (sum(e), e))
    return out


def random_poly(rng: LCG, nvars: int, degree: int, coeff: int = 3) -> Poly:
    """Polynomial with every monomial of degree <= ``degree`` given an
    integer coefficient drawn from [-coeff, coeff]."""
    return Poly(nvars, {e: rng.randint(-coeff, coeff) for e in monomials(nvars, degree)})


def random_unipotent(rng: LCG, size: int, nvars: int, degree: int, coeff: int = 3,
                     lower: bool = False) -> PolyMatrix:
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if i == j:
                row.append(Poly.one(nvars))
            elif (j > i) != lower:
                row.append(random_poly(rng, nvars, degree, coeff))
            else:
                row.append(Poly.zero(nvars))
        rows.append(row)
    return PolyMatrix(rows, nvars)
