"""Free associative algebra over indexed generators with integer coefficients.

No relations are imposed, so an identity that holds here holds for the
commutator of every associative ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

__all__ = [
    "ArityError",
    "Generator",
    "FreeExpr",
    "commutator",
    "nested_commutator",
    "is_zero",
]


class ArityError(ValueError):
    pass


def _index_key(index):
    return (0, index, "") if isinstance(index, int) else (1, 0, str(index))


@dataclass(frozen=True)
class Generator:
    label: str
    index: object

    def sort_key(self):
        return (self.label, _index_key(self.index))

    def __str__(self) -> str:
        return f"{self.label}{self.index}" if isinstance(self.index, int) else f"{self.label}_{self.index}"


Word = tuple  # tuple[Generator, ...]; the empty tuple is the unit


def _word_key(word: Word):
    return (len(word), [g.sort_key() for g in word])


class FreeExpr:
    """Integer linear combination of words."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Word, int] | None = None):
        clean = {}
        for w, c in (terms or {}).items():
            if not isinstance(c, int):
                raise TypeError("free algebra coefficients are integers")
            if c:
                clean[tuple(w)] = clean.get(tuple(w), 0) + c
        self._terms = {w: c for w, c in clean.items() if c}

    @classmethod
    def _raw(cls, terms: dict) -> "FreeExpr":
        e = object.__new__(cls)
        e._terms = terms
        return e

    @classmethod
    def generator(cls, label: str, index) -> "FreeExpr":
        return cls._raw({(Generator(label, index),): 1})

    @classmethod
    def unit(cls) -> "FreeExpr":
        return cls._raw({(): 1})

    @classmethod
    def zero(cls) -> "FreeExpr":
        return cls._raw({})

    @classmethod
    def word(cls, gens: Iterable[Generator], coeff: int = 1) -> "FreeExpr":
        return cls({tuple(gens): coeff})

    def terms(self) -> list[tuple[Word, int]]:
        return sorted(self._terms.items(), key=lambda t: _word_key(t[0]))

    def __len__(self) -> int:
        return len(self._terms)

    def coefficient(self, word: Word) -> int:
        return self._terms.get(tuple(word), 0)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, FreeExpr):
            return self._terms == other._terms
        if other == 0:
            return not self._terms
        return NotImplemented

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "FreeExpr") -> "FreeExpr":
        if not isinstance(other, FreeExpr):
            if other == 0:
                return self
            return NotImplemented
        acc = dict(self._terms)
        for w, c in other._terms.items():
            v = acc.get(w, 0) + c
            if v:
                acc[w] = v
            else:
                del acc[w]
        return FreeExpr._raw(acc)

    __radd__ = __add__

    def __neg__(self) -> "FreeExpr":
        return FreeExpr._raw({w: -c for w, c in self._terms.items()})

    def __sub__(self, other: "FreeExpr") -> "FreeExpr":
        return self + (-other)

    def __mul__(self, other) -> "FreeExpr":
        if isinstance(other, int):
            if not other:
                return FreeExpr.zero()
            return FreeExpr._raw({w: c * other for w, c in self._terms.items()})
        if not isinstance(other, FreeExpr):
            return NotImplemented
        acc: dict = {}
        for w1, c1 in self._terms.items():
            for w2, c2 in other._terms.items():
                w = w1 + w2
                acc[w] = acc.get(w, 0) + c1 * c2
        return FreeExpr._raw({w: c for w, c in acc.items() if c})

    def __rmul__(self, other) -> "FreeExpr":
        if isinstance(other, int):
            return self * other
        return NotImplemented

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        out = []
        for w, c in self.terms():
            body = "".join(str(g) for g in w) or "1"
            mag = abs(c)
            piece = body if mag == 1 else f"{mag}*{body}"
            out.append(("- " if c < 0 else "+ ") + piece)
        s = " ".join(out)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]

    def __repr__(self) -> str:
        return f"FreeExpr({self})"


def commutator(a: FreeExpr, b: FreeExpr) -> FreeExpr:
    return a * b - b * a


def nested_commutator(elems) -> FreeExpr:
    """Right-nested commutator [e1, [e2, [..., [e_{p-1}, e_p]...]]]."""
    elems = list(elems)
    if len(elems) < 2:
        raise ArityError("a nested commutator needs at least two entries")
    acc = elems[-1]
    for e in reversed(elems[:-1]):
        acc = commutator(e, acc)
    return acc


def is_zero(e: FreeExpr) -> bool:
    return e.is_zero()
