"""Recursive-descent parser for polynomial input.

Grammar (whitespace is ignored, multiplication must be written)::

    expr     := term (('+' | '-') term)*
    term     := factor ('*' factor)*
    factor   := base ('^' nonneg-int)?
    base     := rational | var | '(' expr ')' | '-' factor
    rational := int ('/' positive-int)?
    var      := ('x' | 'y') positive-int

One-point polynomials use ``x1..xn``.  Two-point polynomials use ``y1..yn``
for the target point and ``x1..xn`` for the source point and live in ``2n``
variables ordered (y, x), the layout of the transport module.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .exactmath import Poly

__all__ = ["ParseError", "parse_poly", "variable_names", "format_poly"]


class ParseError(ValueError):
    """Syntax or range error; ``pos`` is the 0-based offset into the text."""

    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos + 1}")


_TOKEN = re.compile(r"\s*(?:(\d+)|([xy])(\d+)|(.))")


def variable_names(n: int, two_point: bool = False) -> list[str]:
    xs = [f"x{i}" for i in range(1, n + 1)]
    return [f"y{i}" for i in range(1, n + 1)] + xs if two_point else xs


def format_poly(p: Poly, n: int, two_point: bool = False) -> str:
    return p.format(variable_names(n, two_point))


def _tokenize(text: str) -> list[tuple[str, object, int]]:
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m.group(0).strip() == "":
            break
        start = m.start(0) + len(m.group(0)) - len(m.group(0).lstrip())
        if m.group(1) is not None:
            out.append(("int", int(m.group(1)), start))
        elif m.group(2) is not None:
            out.append(("var", (m.group(2), int(m.group(3))), start))
        else:
            ch = m.group(4)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", start, text)
            out.append((ch, ch, start))
        pos = m.end(0)
    out.append(("end", None, len(text)))
    return out


class _Parser:
    def __init__(self, text: str, n: int, two_point: bool):
        self.text = text
        self.n = n
        self.two_point = two_point
        self.nvars = 2 * n if two_point else n
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, kind: str | None = None):
        tok = self.toks[self.i]
        if kind is not None and tok[0] != kind:
            want = "end of input" if kind == "end" else repr(kind)
            got = "end of input" if tok[0] == "end" else repr(self.text[tok[2]:tok[2] + 1])
            raise ParseError(f"expected {want}, found {got}", tok[2], self.text)
        self.i += 1
        return tok

    def expr(self) -> Poly:
        acc = self.term()
        while self.peek()[0] in "+-":
            op = self.take()[0]
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self) -> Poly:
        acc = self.factor()
        while self.peek()[0] == "*":
            self.take()
            acc = acc * self.factor()
        return acc

    def factor(self) -> Poly:
        b = self.base()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise ParseError("exponent must be a non-negative integer", tok[2], self.text)
            self.take()
            b = b ** tok[1]
        return b

    def base(self) -> Poly:
        kind, val, pos = self.peek()
        if kind == "int":
            self.take()
            num = val
            if self.peek()[0] == "/":
                self.take()
                dk, dv, dpos = self.peek()
                if dk != "int":
                    raise ParseError("denominator must be a positive integer", dpos, self.text)
                if dv == 0:
                    raise ParseError("zero denominator", dpos, self.text)
                self.take()
                return Poly.constant(Fraction(num, dv), self.nvars)
            return Poly.constant(num, self.nvars)
        if kind == "var":
            self.take()
            letter, idx = val
            if letter == "y" and not self.two_point:
                raise ParseError("variable y is only allowed in two-point entries", pos, self.text)
            if not 1 <= idx <= self.n:
                raise ParseError(f"variable {letter}{idx} outside 1..{self.n}", pos, self.text)
            offset = self.n if (letter == "x" and self.two_point) else 0
            return Poly.variable(offset + idx, self.nvars)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        if kind == "-":
            self.take()
            return -self.factor()
        what = "end of input" if kind == "end" else repr(self.text[pos:pos + 1])
        raise ParseError(f"unexpected {what}", pos, self.text)


def parse_poly(text: str, n: int, two_point: bool = False) -> Poly:
    """Parse ``text`` into an exact polynomial in ``n`` (or ``2n``) variables."""
    if n < 1:
        raise ValueError("variable count must be positive")
    p = _Parser(text, n, two_point)
    out = p.expr()
    p.take("end")
    return out
