"""The multi-index bracket operation on formal sums of index tuples.

A :class:`TupleSum` stands for an integer combination of symbols
``A_{i1...iq}``.  The bracket on positions ``r1..rp`` of a single term is
built from the cycles ``tau_p`` and acts on that term's own index
variables:

    (A_t)[r1,r2]            = A_t - A_{t o tau_2}
    (A_t)[r1,[r2,...,rp]]   = (A_t - A_{t o tau_p})[r2,[...,rp]]

where in the recursive step the inner bracket renames the index
*variables* (not the slots of the already permuted tuple).  Applied to the
product word ``A_{i1}...A_{ip}`` the full bracket yields the right-nested
commutator, and applied to a nested commutator it multiplies it by ``p``.
Sums are bracketed term by term.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Sequence

__all__ = [
    "PositionError",
    "LabelError",
    "Permutation",
    "TupleSum",
    "tau_perm",
    "bracket_apply",
    "full_positions",
    "cyclic_sum",
    "reversed_tail_term",
    "instantiate",
    "canonical_labels",
]


class PositionError(ValueError):
    pass


class LabelError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    """Bijection of {1..q}; ``image[a-1]`` is the image of ``a``."""

    image: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.image) != list(range(1, len(self.image) + 1)):
            raise ValueError(f"{self.image} is not a permutation")

    @property
    def size(self) -> int:
        return len(self.image)

    def __call__(self, a: int) -> int:
        return self.image[a - 1]

    def apply(self, labels: Sequence) -> tuple:
        """Slot ``a`` of the result holds ``labels[tau(a)]``, the convention
        of writing ``A_{i_tau(1) ... i_tau(q)}``."""
        if len(labels) != self.size:
            raise PositionError("tuple length does not match the permutation")
        return tuple(labels[t - 1] for t in self.image)

    def compose(self, other: "Permutation") -> "Permutation":
        """(self o other)(a) = self(other(a))."""
        return Permutation(tuple(self(other(a)) for a in range(1, other.size + 1)))

    def inverse(self) -> "Permutation":
        inv = [0] * self.size
        for a, t in enumerate(self.image, start=1):
            inv[t - 1] = a
        return Permutation(tuple(inv))


def _check_positions(positions: Sequence[int], q: int) -> tuple[int, ...]:
    positions = tuple(positions)
    if len(positions) < 2:
        raise PositionError("a bracket needs at least two positions")
    if len(positions) > q:
        raise PositionError(f"{len(positions)} positions exceed tuple length {q}")
    if len(set(positions)) != len(positions):
        raise PositionError(f"bracket positions {positions} are not distinct")
    for r in positions:
        if not 1 <= r <= q:
            raise PositionError(f"position {r} outside 1..{q}")
    return positions


def tau_perm(positions: Sequence[int], q: int) -> Permutation:
    """The cycle r1 -> r2 -> ... -> rp -> r1, identity off the positions."""
    positions = _check_positions(positions, q)
    image = list(range(1, q + 1))
    p = len(positions)
    for a in range(p):
        image[positions[a] - 1] = positions[(a + 1) % p]
    return Permutation(tuple(image))


class TupleSum:
    """Integer combination of equal-length index tuples."""

    __slots__ = ("length", "_terms")

    def __init__(self, terms: Mapping[Sequence[Hashable], int] | None = None,
                 length: int | None = None):
        acc: dict[tuple, int] = {}
        for t, c in (terms or {}).items():
            t = tuple(t)
            if length is None:
                length = len(t)
            elif len(t) != length:
                raise LabelError(f"tuple {t} does not have length {length}")
            acc[t] = acc.get(t, 0) + c
        self.length = length
        self._terms = {t: c for t, c in acc.items() if c}

    @classmethod
    def singleton(cls, labels: Sequence[Hashable], coeff: int = 1) -> "TupleSum":
        return cls({tuple(labels): coeff})

    def terms(self) -> list[tuple[tuple, int]]:
        return sorted(self._terms.items(), key=lambda tc: [str(x) for x in tc[0]])

    def items(self):
        return self._terms.items()

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def coefficient_sum(self) -> int:
        return sum(self._terms.values())

    def __eq__(self, other) -> bool:
        if isinstance(other, TupleSum):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def _combine(self, other: "TupleSum", sign: int) -> "TupleSum":
        if self.length is not None and other.length is not None and self.length != other.length:
            raise LabelError("tuple lengths differ")
        acc = dict(self._terms)
        for t, c in other._terms.items():
            acc[t] = acc.get(t, 0) + sign * c
        return TupleSum(acc, self.length if self.length is not None else other.length)

    def __add__(self, other: "TupleSum") -> "TupleSum":
        return self._combine(other, 1)

    def __sub__(self, other: "TupleSum") -> "TupleSum":
        return self._combine(other, -1)

    def __neg__(self) -> "TupleSum":
        return TupleSum({t: -c for t, c in self._terms.items()}, self.length)

    def __mul__(self, k: int) -> "TupleSum":
        return TupleSum({t: c * k for t, c in self._terms.items()}, self.length)

    __rmul__ = __mul__

    def relabel(self, mapping: Mapping[Hashable, Hashable]) -> "TupleSum":
        return TupleSum({tuple(mapping.get(x, x) for x in t): c
                         for t, c in self._terms.items()}, self.length)

    def permute_slots(self, perm: Permutation) -> "TupleSum":
        return TupleSum({perm.apply(t): c for t, c in self._terms.items()}, self.length)

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for t, c in self.terms():
            mag = abs(c)
            body = "(" + ",".join(str(x) for x in t) + ")"
            parts.append(("- " if c < 0 else "+ ") + (body if mag == 1 else f"{mag}{body}"))
        return " ".join(parts)

    def __repr__(self) -> str:
        return f"TupleSum({self})"


def full_positions(p: int) -> tuple[int, ...]:
    return tuple(range(1, p + 1))


@lru_cache(maxsize=None)
def _bracket_table(q: int, positions: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    """The bracket of the tuple of variables (1..q), as (index tuple, coeff)."""
    variables = tuple(range(1, q + 1))
    current = {variables: 1}
    for start in range(len(positions) - 1):
        tau = tau_perm(positions[start:], q)
        rename = {v: tau(v) for v in variables}
        nxt: dict[tuple[int, ...], int] = {}
        for t, c in current.items():
            nxt[t] = nxt.get(t, 0) + c
            moved = tuple(rename[v] for v in t)
            nxt[moved] = nxt.get(moved, 0) - c
        current = {t: c for t, c in nxt.items() if c}
    return tuple(sorted(current.items()))


def bracket_apply(ts: TupleSum, positions: Sequence[int]) -> TupleSum:
    """Apply the bracket on ``positions`` to every term of ``ts``."""
    if ts.length is None:
        return TupleSum()
    positions = _check_positions(positions, ts.length)
    table = _bracket_table(ts.length, positions)
    acc: dict[tuple, int] = {}
    for t, c in ts.items():
        for idx, d in table:
            u = tuple(t[i - 1] for i in idx)
            acc[u] = acc.get(u, 0) + c * d
    return TupleSum(acc, ts.length)


def cyclic_sum(ts: TupleSum, labels: Sequence[Hashable]) -> TupleSum:
    """Sum of ``ts`` over the cyclic relabelings i1 -> i2 -> ... -> i1."""
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        raise LabelError(f"cycle labels {labels} are not distinct")
    k = len(labels)
    total = TupleSum(length=ts.length)
    for shift in range(k):
        mapping = {labels[a]: labels[(a + shift) % k] for a in range(k)}
        total = total + ts.relabel(mapping)
    return total


def canonical_labels(p: int) -> tuple[str, ...]:
    return tuple(f"i{a}" for a in range(1, p + 1))


def reversed_tail_term(p: int, sign: int | None = None) -> TupleSum:
    """``(i1,...,ip) + sign * (i1, ip, ..., i2)``; ``sign`` defaults to (-1)^p."""
    if p < 2:
        raise PositionError("p must be at least 2")
    if sign is None:
        sign = (-1) ** p
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    labels = canonical_labels(p)
    rev = (labels[0],) + tuple(reversed(labels[1:]))
    return TupleSum.singleton(labels) + TupleSum.singleton(rev, sign)


def instantiate(ts: TupleSum, assign: Callable[[tuple], object], zero=None):
    """Linear extension ``sum(coeff * assign(tuple))`` into any additive group
    whose elements support ``+`` and multiplication by an int."""
    total = zero
    for t, c in ts.terms():
        value = assign(t) * c
        total = value if total is None else total + value
    return total
