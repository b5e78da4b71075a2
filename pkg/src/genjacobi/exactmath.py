"""Exact arithmetic substrate: sparse multivariate polynomials over Q and
small polynomial matrices.

Coefficients are Python ints or ``fractions.Fraction`` values; a fraction
whose denominator is 1 is always stored as a plain int, so integer-only work
never pays for rational arithmetic.  Exponent vectors are packed into a
single integer, ``_BITS`` bits per variable, which makes monomial products a
single integer addition.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _RationalABC
from typing import Iterable, Mapping, Sequence

import numpy as np

__all__ = [
    "DimensionError",
    "ShapeError",
    "Poly",
    "PolyMatrix",
    "as_rational",
    "unipotent_inverse",
]

_BITS = 16
_MASK = (1 << _BITS) - 1
_MAX_DEGREE = _MASK


class DimensionError(ValueError):
    """Operands live in rings with different variable counts, or an index is
    out of range."""


class ShapeError(ValueError):
    """A matrix has the wrong shape or structure for the requested operation."""


def as_rational(value) -> int | Fraction:
    """Coerce ``value`` to an exact rational, refusing floats."""
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, _RationalABC):
        return as_rational(Fraction(value.numerator, value.denominator))
    if isinstance(value, str):
        return as_rational(Fraction(value))
    raise TypeError(f"expected an exact rational, got {type(value).__name__}")


def _norm(c):
    if type(c) is Fraction and c.denominator == 1:
        return c.numerator
    return c


def _pack(exps: Sequence[int]) -> int:
    key = 0
    for i, e in enumerate(exps):
        if e < 0 or e > _MAX_DEGREE:
            raise ValueError(f"exponent {e} out of range")
        key |= e << (_BITS * i)
    return key


def _unpack(key: int, n: int) -> tuple[int, ...]:
    return tuple((key >> (_BITS * i)) & _MASK for i in range(n))


def _finish(nvars: int, acc: dict, bound: int) -> "Poly":
    return Poly._raw(nvars, {k: _norm(c) for k, c in acc.items() if c}, bound)


class Poly:
    """Immutable sparse polynomial in ``nvars`` variables with exact rational
    coefficients.

    Build one from a mapping of exponent tuples to coefficients, or with
    :meth:`constant` / :meth:`variable` and ring operations::

        >>> x1, x2 = Poly.variable(1, 2), Poly.variable(2, 2)
        >>> str((x1 + x2) * (x1 - x2))
        'x1^2 - x2^2'

    Variables are numbered from 1.
    """

    __slots__ = ("nvars", "_terms", "_bound", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Sequence[int], object] | None = None):
        if nvars < 0:
            raise DimensionError("variable count must be nonnegative")
        packed: dict[int, object] = {}
        bound = 0
        for exps, coeff in (terms or {}).items():
            exps = tuple(exps)
            if len(exps) != nvars:
                raise DimensionError(
                    f"exponent vector {exps} does not have {nvars} entries")
            c = as_rational(coeff)
            if not c:
                continue
            key = _pack(exps)
            c = packed.get(key, 0) + c
            if c:
                packed[key] = _norm(c)
            else:
                packed.pop(key, None)
            bound = max(bound, sum(exps))
        self.nvars = nvars
        self._terms = packed
        self._bound = bound
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, packed: dict, bound: int) -> "Poly":
        p = object.__new__(cls)
        p.nvars = nvars
        p._terms = packed
        p._bound = bound if packed else 0
        p._hash = None
        return p

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {}, 0)

    @classmethod
    def constant(cls, value, nvars: int) -> "Poly":
        c = as_rational(value)
        return cls._raw(nvars, {0: c} if c else {}, 0)

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.constant(1, nvars)

    @classmethod
    def variable(cls, index: int, nvars: int) -> "Poly":
        if not 1 <= index <= nvars:
            raise DimensionError(f"variable x{index} out of range 1..{nvars}")
        return cls._raw(nvars, {1 << (_BITS * (index - 1)): 1}, 1)

    @classmethod
    def monomial(cls, exps: Sequence[int], coeff=1) -> "Poly":
        return cls(len(exps), {tuple(exps): coeff})

    # -- inspection -------------------------------------------------------

    def terms(self) -> list[tuple[tuple[int, ...], int | Fraction]]:
        """Terms in canonical order: graded lexicographic, highest first."""
        items = [(_unpack(k, self.nvars), c) for k, c in self._terms.items()]
        items.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
        return items

    def as_dict(self) -> dict[tuple[int, ...], int | Fraction]:
        return {_unpack(k, self.nvars): c for k, c in self._terms.items()}

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(sum(_unpack(k, self.nvars)) for k in self._terms)

    def constant_term(self):
        return self._terms.get(0, 0)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 0 in self._terms)

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self._terms == other._terms
        try:
            c = as_rational(other)
        except TypeError:
            return NotImplemented
        return self.is_constant() and self.constant_term() == c

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self._terms.items())))
        return self._hash

    # -- ring operations --------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise DimensionError(
                    f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.constant(other, self.nvars)

    def __add__(self, other) -> "Poly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        if not other._terms:
            return self
        acc = dict(self._terms)
        g = acc.get
        for k, c in other._terms.items():
            acc[k] = g(k, 0) + c
        return _finish(self.nvars, acc, max(self._bound, other._bound))

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {k: -c for k, c in self._terms.items()}, self._bound)

    def __sub__(self, other) -> "Poly":
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def scale(self, c) -> "Poly":
        c = as_rational(c)
        if not c:
            return Poly.zero(self.nvars)
        if c == 1:
            return self
        return Poly._raw(self.nvars, {k: _norm(v * c) for k, v in self._terms.items()},
                         self._bound)

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._coerce(other)
        fast = _batched_products([(self, other)], self.nvars)
        if fast is not None:
            return Poly._raw(self.nvars, fast, self._bound + other._bound)
        acc: dict = {}
        _addmul(acc, self, other)
        return _finish(self.nvars, acc, self._bound + other._bound)

    def __rmul__(self, other) -> "Poly":
        try:
            return self.scale(other)
        except TypeError:
            return NotImplemented

    def __pow__(self, k: int) -> "Poly":
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        result = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    # -- calculus and evaluation -----------------------------------------

    def diff(self, index: int) -> "Poly":
        """Formal partial derivative with respect to variable ``index`` (1-based)."""
        if not 1 <= index <= self.nvars:
            raise DimensionError(f"variable x{index} out of range 1..{self.nvars}")
        shift = _BITS * (index - 1)
        one = 1 << shift
        out = {}
        for k, c in self._terms.items():
            e = (k >> shift) & _MASK
            if e:
                out[k - one] = c * e
        return Poly._raw(self.nvars, out, self._bound)

    def evaluate(self, point: Sequence) -> int | Fraction:
        """Exact value at a rational point."""
        if len(point) != self.nvars:
            raise DimensionError(
                f"point has {len(point)} coordinates, expected {self.nvars}")
        pt = [as_rational(v) for v in point]
        total = 0
        for k, c in self._terms.items():
            term = c
            for i, v in enumerate(pt):
                e = (k >> (_BITS * i)) & _MASK
                if e:
                    term = term * v ** e
            total += term
        return _norm(total) if isinstance(total, Fraction) else total

    __call__ = evaluate

    def specialize(self, values: Mapping[int, object]) -> "Poly":
        """Substitute rational values for some variables (1-based keys).

        The variable count is unchanged; substituted variables simply no
        longer occur.
        """
        for i in values:
            if not 1 <= i <= self.nvars:
                raise DimensionError(f"variable x{i} out of range 1..{self.nvars}")
        subs = [(_BITS * (i - 1), as_rational(v)) for i, v in values.items()]
        acc: dict = {}
        g = acc.get
        for k, c in self._terms.items():
            for shift, v in subs:
                e = (k >> shift) & _MASK
                if e:
                    c = c * v ** e
                    k -= e << shift
            acc[k] = g(k, 0) + c
        return _finish(self.nvars, acc, self._bound)

    def remap(self, targets: Sequence[int], nvars: int) -> "Poly":
        """Rename variables: old variable ``i`` becomes new variable
        ``targets[i-1]`` in a ring of ``nvars`` variables.

        Several old variables may map to the same new one; this is how the
        diagonal restriction ``y := x`` of a two-point polynomial is taken.
        """
        if len(targets) != self.nvars:
            raise DimensionError(f"need {self.nvars} targets, got {len(targets)}")
        for t in targets:
            if not 1 <= t <= nvars:
                raise DimensionError(f"target variable {t} out of range 1..{nvars}")
        shifts = [_BITS * (t - 1) for t in targets]
        acc: dict = {}
        g = acc.get
        for k, c in self._terms.items():
            new = 0
            for i, s in enumerate(shifts):
                e = (k >> (_BITS * i)) & _MASK
                if e:
                    new += e << s
            acc[new] = g(new, 0) + c
        return _finish(nvars, acc, self._bound)

    # -- printing ---------------------------------------------------------

    def format(self, names: Sequence[str] | None = None) -> str:
        if names is None:
            names = [f"x{i}" for i in range(1, self.nvars + 1)]
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.terms():
            mono = "*".join(
                names[i] if e == 1 else f"{names[i]}^{e}"
                for i, e in enumerate(exps) if e)
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            parts.append((sign, body))
        first_sign, first = parts[0]
        out = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"Poly({self.nvars}, {self.format()!r})"


# Large integer products are summed with int64 numpy arrays when no
# intermediate value can overflow: packed exponent keys must fit in 63 bits
# and the l1-norm bound below must stay under 2**62.
_FAST_MIN_WORK = 3000
_FAST_MAX_VARS = 63 // _BITS
_INT64_SAFE = 1 << 62


def _l1_int(p: "Poly") -> int | None:
    total = 0
    for c in p._terms.values():
        if type(c) is not int:
            return None
        total += c if c > 0 else -c
    return total


def _batched_products(pairs: list[tuple["Poly", "Poly"]], nvars: int) -> dict | None:
    """sum(p * q) over ``pairs`` computed in numpy, or None when unsafe or
    not worth it.  The caller falls back to the exact dictionary loop."""
    if nvars > _FAST_MAX_VARS:
        return None
    work = 0
    bound = 0
    for p, q in pairs:
        work += len(p._terms) * len(q._terms)
    if work < _FAST_MIN_WORK:
        return None
    for p, q in pairs:
        lp, lq = _l1_int(p), _l1_int(q)
        if lp is None or lq is None:
            return None
        bound += lp * lq
        if bound >= _INT64_SAFE:
            return None
    keys, coefs = [], []
    for p, q in pairs:
        tp, tq = p._terms, q._terms
        kp = np.fromiter(tp.keys(), np.int64, len(tp))
        cp = np.fromiter(tp.values(), np.int64, len(tp))
        kq = np.fromiter(tq.keys(), np.int64, len(tq))
        cq = np.fromiter(tq.values(), np.int64, len(tq))
        keys.append(np.add.outer(kp, kq).ravel())
        coefs.append(np.multiply.outer(cp, cq).ravel())
    k = np.concatenate(keys)
    c = np.concatenate(coefs)
    order = np.argsort(k, kind="stable")
    k, c = k[order], c[order]
    starts = np.flatnonzero(np.concatenate(([True], k[1:] != k[:-1])))
    sums = np.add.reduceat(c, starts)
    nz = sums != 0
    return dict(zip(k[starts][nz].tolist(), sums[nz].tolist()))


def _addmul(acc: dict, p: Poly, q: Poly, scale=1) -> None:
    """acc += scale * p * q, on packed term dictionaries."""
    g = acc.get
    if len(p._terms) < len(q._terms):
        p, q = q, p
    qitems = list(q._terms.items())
    if scale != 1:
        qitems = [(k, c * scale) for k, c in qitems]
    for k1, c1 in p._terms.items():
        for k2, c2 in qitems:
            k = k1 + k2
            acc[k] = g(k, 0) + c1 * c2


def dot(ps: Iterable[Poly], qs: Iterable[Poly], nvars: int | None = None) -> Poly:
    """Sum of pairwise products, accumulated without intermediate polynomials."""
    bound = 0
    n = nvars
    pairs = []
    for p, q in zip(ps, qs):
        if n is None:
            n = p.nvars
        if p.nvars != n or q.nvars != n:
            raise DimensionError("variable count mismatch in dot product")
        if p._terms and q._terms:
            pairs.append((p, q))
            bound = max(bound, p._bound + q._bound)
    if n is None:
        raise ValueError("empty dot product needs an explicit variable count")
    fast = _batched_products(pairs, n)
    if fast is not None:
        return Poly._raw(n, fast, bound)
    acc: dict = {}
    for p, q in pairs:
        _addmul(acc, p, q)
    return _finish(n, acc, bound)


def poly_sum(polys: Iterable[Poly], nvars: int) -> Poly:
    acc: dict = {}
    g = acc.get
    bound = 0
    for p in polys:
        if p.nvars != nvars:
            raise DimensionError("variable count mismatch in sum")
        for k, c in p._terms.items():
            acc[k] = g(k, 0) + c
        bound = max(bound, p._bound)
    return _finish(nvars, acc, bound)


class PolyMatrix:
    """Immutable rectangular matrix of :class:`Poly` entries sharing one
    variable count."""

    __slots__ = ("rows", "nvars")

    def __init__(self, rows: Sequence[Sequence[object]], nvars: int):
        if not rows or not rows[0]:
            raise ShapeError("matrix must have at least one row and one column")
        width = len(rows[0])
        built = []
        for row in rows:
            if len(row) != width:
                raise ShapeError("matrix rows have different lengths")
            built.append(tuple(
                e if isinstance(e, Poly) else Poly.constant(e, nvars) for e in row))
        for row in built:
            for e in row:
                if e.nvars != nvars:
                    raise DimensionError("matrix entries must share the variable count")
        self.rows = tuple(built)
        self.nvars = nvars

    @classmethod
    def identity(cls, size: int, nvars: int) -> "PolyMatrix":
        return cls([[1 if i == j else 0 for j in range(size)] for i in range(size)], nvars)

    @classmethod
    def zeros(cls, nrows: int, ncols: int, nvars: int) -> "PolyMatrix":
        return cls([[0] * ncols for _ in range(nrows)], nvars)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.rows), len(self.rows[0])

    def __getitem__(self, ij) -> Poly:
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> tuple[Poly, ...]:
        return tuple(row[j] for row in self.rows)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolyMatrix):
            return NotImplemented
        return self.nvars == other.nvars and self.rows == other.rows

    def __hash__(self) -> int:
        return hash((self.nvars, self.rows))

    def _check_same(self, other: "PolyMatrix") -> None:
        if self.shape != other.shape:
            raise ShapeError(f"shape mismatch: {self.shape} vs {other.shape}")
        if self.nvars != other.nvars:
            raise DimensionError("variable count mismatch")

    def map(self, fn) -> "PolyMatrix":
        return PolyMatrix([[fn(e) for e in row] for row in self.rows], self.nvars)

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same(other)
        return PolyMatrix([[a + b for a, b in zip(r, s)]
                           for r, s in zip(self.rows, other.rows)], self.nvars)

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        self._check_same(other)
        return PolyMatrix([[a - b for a, b in zip(r, s)]
                           for r, s in zip(self.rows, other.rows)], self.nvars)

    def __neg__(self) -> "PolyMatrix":
        return self.map(lambda e: -e)

    def __mul__(self, c) -> "PolyMatrix":
        """Entrywise scaling by a rational or a polynomial."""
        return self.map(lambda e: e * c)

    __rmul__ = __mul__

    def __matmul__(self, other):
        if isinstance(other, PolyMatrix):
            if self.shape[1] != other.shape[0]:
                raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
            if self.nvars != other.nvars:
                raise DimensionError("variable count mismatch")
            cols = [other.column(j) for j in range(other.shape[1])]
            return PolyMatrix([[dot(row, col, self.nvars) for col in cols]
                               for row in self.rows], self.nvars)
        # matrix times a vector of polynomials
        vec = tuple(other)
        if len(vec) != self.shape[1]:
            raise ShapeError(f"cannot apply {self.shape} matrix to length-{len(vec)} vector")
        return tuple(dot(row, vec, self.nvars) for row in self.rows)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix([list(c) for c in zip(*self.rows)], self.nvars)

    def diff(self, index: int) -> "PolyMatrix":
        return self.map(lambda e: e.diff(index))

    def evaluate(self, point: Sequence) -> list[list[int | Fraction]]:
        return [[e.evaluate(point) for e in row] for row in self.rows]

    def specialize(self, values: Mapping[int, object]) -> "PolyMatrix":
        return self.map(lambda e: e.specialize(values))

    def remap(self, targets: Sequence[int], nvars: int) -> "PolyMatrix":
        return PolyMatrix([[e.remap(targets, nvars) for e in row] for row in self.rows], nvars)

    def is_zero(self) -> bool:
        return all(e.is_zero() for row in self.rows for e in row)

    def is_identity(self) -> bool:
        n, m = self.shape
        return n == m and all(
            self.rows[i][j] == (1 if i == j else 0) for i in range(n) for j in range(m))

    def triangularity(self) -> str | None:
        """'upper', 'lower' or 'diagonal' when the matrix is triangular with an
        all-ones diagonal; None otherwise."""
        n, m = self.shape
        if n != m or any(self.rows[i][i] != 1 for i in range(n)):
            return None
        upper = all(self.rows[i][j].is_zero() for i in range(n) for j in range(i))
        lower = all(self.rows[i][j].is_zero() for i in range(n) for j in range(i + 1, n))
        if upper and lower:
            return "diagonal"
        if upper:
            return "upper"
        if lower:
            return "lower"
        return None

    def format(self, names: Sequence[str] | None = None) -> list[list[str]]:
        return [[e.format(names) for e in row] for row in self.rows]

    def __repr__(self) -> str:
        return f"PolyMatrix({self.format()!r}, nvars={self.nvars})"


def unipotent_inverse(m: PolyMatrix) -> PolyMatrix:
    """Inverse of a triangular matrix with unit diagonal.

    With ``m = I + N`` and ``N`` nilpotent, the inverse is the finite series
    ``I - N + N^2 - ...``; it has polynomial entries.  Other matrices are
    rejected, since a general polynomial matrix has no polynomial inverse.
    """
    if m.triangularity() is None:
        raise ShapeError("unipotent_inverse needs a square triangular matrix with unit diagonal")
    size = m.shape[0]
    ident = PolyMatrix.identity(size, m.nvars)
    neg_nil = ident - m
    result = ident
    power = ident
    for _ in range(size - 1):
        power = power @ neg_nil
        if power.is_zero():
            break
        result = result + power
    return result
