"""Affine connections on one polynomial chart: Lie bracket, covariant
derivative, curvature and torsion, their Leibniz derivatives, and exact
checks of the curvature/torsion identities.

Christoffel coefficients are stored as ``gamma[k][a][b]`` for
``Gamma^k_{ab}`` with ``a`` the differentiation direction and ``b`` the
argument slot, so that

    (nabla_A B)^k = sum_a A^a (d_a B^k + sum_b Gamma^k_{ab} B^b).

Indices are 0-based in code and 1-based in user-facing text.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

from .exactmath import DimensionError, Poly, dot
from .index_bracket import TupleSum, cyclic_sum, instantiate
from .prng import LCG, derive_seed, random_poly
from .results import VerificationResult

__all__ = [
    "VectorField",
    "Connection",
    "lie_bracket",
    "cov_deriv",
    "torsion",
    "curvature",
    "coordinate_torsion",
    "coordinate_curvature",
    "curvature_tensor",
    "torsion_tensor",
    "Calculus",
    "GEOMETRY_IDENTITIES",
    "ACCEPTANCE_GEOMETRY_IDS",
    "evaluate_geometry_identity",
    "verify_geometry_identity",
    "random_fields",
    "random_scenario",
]


class VectorField:
    """A polynomial vector field on an ``n``-dimensional chart."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[Poly | int]):
        comps = list(components)
        if not comps:
            raise DimensionError("a vector field needs at least one component")
        n = len(comps)
        built = []
        for c in comps:
            if not isinstance(c, Poly):
                c = Poly.constant(c, n)
            if c.nvars != n:
                raise DimensionError(
                    f"component in {c.nvars} variables for a field of dimension {n}")
            built.append(c)
        self.components = tuple(built)

    @property
    def dim(self) -> int:
        return len(self.components)

    @classmethod
    def zero(cls, n: int) -> "VectorField":
        return cls([Poly.zero(n)] * n)

    @classmethod
    def coordinate(cls, alpha: int, n: int) -> "VectorField":
        """The coordinate field d/dx^alpha (1-based)."""
        if not 1 <= alpha <= n:
            raise DimensionError(f"direction {alpha} outside 1..{n}")
        return cls([1 if k == alpha - 1 else 0 for k in range(n)])

    def __getitem__(self, k: int) -> Poly:
        return self.components[k]

    def _check(self, other: "VectorField") -> None:
        if self.dim != other.dim:
            raise DimensionError(f"fields of dimension {self.dim} and {other.dim}")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField([a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "VectorField") -> "VectorField":
        self._check(other)
        return VectorField([a - b for a, b in zip(self.components, other.components)])

    def __neg__(self) -> "VectorField":
        return VectorField([-a for a in self.components])

    def __mul__(self, f) -> "VectorField":
        """Pointwise product with a polynomial or a rational constant."""
        return VectorField([a * f for a in self.components])

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, VectorField):
            return self.components == other.components
        if other == 0:
            return self.is_zero()
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.components)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def apply(self, f: Poly) -> Poly:
        """The derivation A(f) = sum_a A^a d_a f."""
        n = self.dim
        return dot(self.components, [f.diff(a + 1) for a in range(n)], n)

    def format(self) -> list[str]:
        return [c.format() for c in self.components]

    def __repr__(self) -> str:
        return f"VectorField({self.format()})"


def lie_bracket(A: VectorField, B: VectorField) -> VectorField:
    A._check(B)
    return VectorField([A.apply(b) - B.apply(a) for a, b in zip(A.components, B.components)])


@dataclass(frozen=True)
class Connection:
    """Christoffel coefficients ``gamma[k][a][b]`` as polynomials in ``dim``
    variables.  No symmetry is assumed."""

    dim: int
    gamma: tuple

    def __post_init__(self):
        n = self.dim
        g = self.gamma
        if len(g) != n or any(len(row) != n or any(len(r) != n for r in row) for row in g):
            raise DimensionError(f"Christoffel array must be {n}x{n}x{n}")
        for row in g:
            for r in row:
                for p in r:
                    if not isinstance(p, Poly) or p.nvars != n:
                        raise DimensionError("Christoffel entries must be polynomials "
                                             f"in {n} variables")

    @classmethod
    def from_entries(cls, n: int, entries: Mapping[tuple[int, int, int], Poly | int]
                     ) -> "Connection":
        """Build from 1-based ``(k, a, b) -> Gamma^k_{ab}``; missing entries are 0."""
        g = [[[Poly.zero(n) for _ in range(n)] for _ in range(n)] for _ in range(n)]
        for (k, a, b), v in entries.items():
            for i in (k, a, b):
                if not 1 <= i <= n:
                    raise DimensionError(f"Christoffel index {(k, a, b)} outside 1..{n}")
            g[k - 1][a - 1][b - 1] = v if isinstance(v, Poly) else Poly.constant(v, n)
        return cls(n, tuple(tuple(tuple(r) for r in row) for row in g))

    @classmethod
    def flat(cls, n: int) -> "Connection":
        return cls.from_entries(n, {})

    @classmethod
    def random(cls, rng: LCG, n: int, degree: int = 2, coeff: int = 3,
               symmetric: bool = False) -> "Connection":
        entries = {}
        for k in range(1, n + 1):
            for a in range(1, n + 1):
                for b in range(1, n + 1):
                    if symmetric and b < a:
                        entries[(k, a, b)] = entries[(k, b, a)]
                    else:
                        entries[(k, a, b)] = random_poly(rng, n, degree, coeff)
        return cls.from_entries(n, entries)

    def entry(self, k: int, a: int, b: int) -> Poly:
        """1-based accessor."""
        return self.gamma[k - 1][a - 1][b - 1]

    def is_symmetric(self) -> bool:
        n = self.dim
        return all(self.gamma[k][a][b] == self.gamma[k][b][a]
                   for k in range(n) for a in range(n) for b in range(n))


def _check_dim(conn: Connection, *fields: VectorField) -> None:
    for f in fields:
        if f.dim != conn.dim:
            raise DimensionError(f"field of dimension {f.dim} with a connection "
                                 f"of dimension {conn.dim}")


def cov_deriv(conn: Connection, A: VectorField, B: VectorField) -> VectorField:
    _check_dim(conn, A, B)
    n = conn.dim
    out = []
    for k in range(n):
        # sum_a A^a (d_a B^k + sum_b G^k_ab B^b)
        inner = [B[k].diff(a + 1) + dot(conn.gamma[k][a], B.components, n) for a in range(n)]
        out.append(dot(A.components, inner, n))
    return VectorField(out)


def torsion(conn: Connection, A: VectorField, B: VectorField) -> VectorField:
    return cov_deriv(conn, A, B) - cov_deriv(conn, B, A) - lie_bracket(A, B)


def curvature(conn: Connection, A: VectorField, B: VectorField, C: VectorField) -> VectorField:
    """R(A,B)C = nabla_A nabla_B C - nabla_B nabla_A C - nabla_[A,B] C."""
    return (cov_deriv(conn, A, cov_deriv(conn, B, C))
            - cov_deriv(conn, B, cov_deriv(conn, A, C))
            - cov_deriv(conn, lie_bracket(A, B), C))


def coordinate_torsion(conn: Connection) -> list:
    """T[l][a][b] = Gamma^l_{ab} - Gamma^l_{ba}."""
    n, g = conn.dim, conn.gamma
    return [[[g[l][a][b] - g[l][b][a] for b in range(n)] for a in range(n)] for l in range(n)]


def coordinate_curvature(conn: Connection) -> list:
    """R[l][k][a][b], the l-component of R(d_a, d_b) d_k, from the classical
    coordinate formula."""
    n, g = conn.dim, conn.gamma
    out = []
    for l in range(n):
        rows = []
        for k in range(n):
            block = []
            for a in range(n):
                line = []
                for b in range(n):
                    v = g[l][b][k].diff(a + 1) - g[l][a][k].diff(b + 1)
                    v = v + dot([g[l][a][m] for m in range(n)], [g[m][b][k] for m in range(n)], n)
                    v = v - dot([g[l][b][m] for m in range(n)], [g[m][a][k] for m in range(n)], n)
                    line.append(v)
                block.append(line)
            rows.append(block)
        out.append(rows)
    return out


def curvature_tensor(conn: Connection) -> list:
    """R[l][k][a][b] computed from the operator on coordinate fields."""
    n = conn.dim
    e = [VectorField.coordinate(a, n) for a in range(1, n + 1)]
    comps = {(k, a, b): curvature(conn, e[a], e[b], e[k])
             for k in range(n) for a in range(n) for b in range(n)}
    return [[[[comps[(k, a, b)][l] for b in range(n)] for a in range(n)]
             for k in range(n)] for l in range(n)]


def torsion_tensor(conn: Connection) -> list:
    """T[l][a][b] computed from the operator on coordinate fields."""
    n = conn.dim
    e = [VectorField.coordinate(a, n) for a in range(1, n + 1)]
    comps = {(a, b): torsion(conn, e[a], e[b]) for a in range(n) for b in range(n)}
    return [[[comps[(a, b)][l] for b in range(n)] for a in range(n)] for l in range(n)]


Tensor = Callable[..., VectorField]


def _contract_slots(table: dict, vectors: Mapping[int, VectorField], arity: int,
                    n: int) -> dict:
    """Contract a component table keyed ``(l, i1, .., i_arity)`` with the fields
    given for some slots (0-based).  Slots are contracted smallest field
    first, so a large field is multiplied only a few times.  The result is
    keyed by ``l`` followed by the free slot indices."""
    slots = list(range(arity))
    order = sorted(vectors, key=lambda s: sum(len(c) for c in vectors[s].components))
    cur = table
    for s in order:
        pos = slots.index(s) + 1
        comps = vectors[s].components
        groups: dict[tuple, tuple[list, list]] = {}
        for key, val in cur.items():
            rest = key[:pos] + key[pos + 1:]
            left, right = groups.setdefault(rest, ([], []))
            left.append(val)
            right.append(comps[key[pos]])
        cur = {rest: dot(left, right, n) for rest, (left, right) in groups.items()}
        slots.pop(pos - 1)
    return cur


def _contract(table: dict, vectors: Sequence[VectorField], n: int) -> VectorField:
    cur = _contract_slots(table, dict(enumerate(vectors)), len(vectors), n)
    zero = Poly.zero(n)
    return VectorField([cur.get((l,), zero) for l in range(n)])


class Calculus:
    """Curvature, torsion and their Leibniz derivatives for one connection.

    R, T, nabla R and nabla T are evaluated by contracting component tables
    obtained once from the operator (and Leibniz) definitions on coordinate
    fields.  All four are tensorial, so this equals the operator value
    exactly but keeps polynomial degrees low.  ``direct=True`` uses the operators
    themselves.
    """

    def __init__(self, conn: Connection, direct: bool = False):
        self.conn = conn
        self.n = conn.dim
        self.direct = direct
        self._memo: dict = {}
        self._endo: dict = {}
        if not direct:
            n = self.n
            R, T = curvature_tensor(conn), torsion_tensor(conn)
            # slot order (l, first, second, third argument)
            self._Rtab = {(l, a, b, k): R[l][k][a][b] for l in range(n) for k in range(n)
                          for a in range(n) for b in range(n) if R[l][k][a][b]}
            self._Ttab = {(l, a, b): T[l][a][b] for l in range(n)
                          for a in range(n) for b in range(n) if T[l][a][b]}
            e = [VectorField.coordinate(a, n) for a in range(1, n + 1)]
            self._dRtab = self._table(
                lambda i: self.nabla_tensor(e[i[0]], self.R)(*(e[j] for j in i[1:])), 4)
            self._dTtab = self._table(
                lambda i: self.nabla_tensor(e[i[0]], self.T)(*(e[j] for j in i[1:])), 3)

    def _table(self, value: Callable[[tuple], VectorField], arity: int) -> dict:
        out = {}
        for idx in itertools.product(range(self.n), repeat=arity):
            v = value(idx)
            for l, c in enumerate(v.components):
                if c:
                    out[(l,) + idx] = c
        return out

    def nabla(self, A: VectorField, B: VectorField) -> VectorField:
        return cov_deriv(self.conn, A, B)

    def R(self, A: VectorField, B: VectorField, C: VectorField) -> VectorField:
        if self.direct:
            return curvature(self.conn, A, B, C)
        _check_dim(self.conn, A, B, C)
        key = (A, B, C)
        hit = self._memo.get(key)
        if hit is None:
            n = self.n
            endo = self._endo.get((A, B))
            if endo is None:
                endo = self._endo[(A, B)] = self._endomorphism(A, B)
            hit = VectorField([dot(endo[l], C.components, n) for l in range(n)])
            self._memo[key] = hit
        return hit

    def _endomorphism(self, A: VectorField, B: VectorField) -> list[list[Poly]]:
        """Matrix of R(A,B) acting on the third slot."""
        n = self.n
        cur = _contract_slots(self._Rtab, {0: A, 1: B}, 3, n)
        zero = Poly.zero(n)
        return [[cur.get((l, k), zero) for k in range(n)] for l in range(n)]

    def T(self, A: VectorField, B: VectorField) -> VectorField:
        if self.direct:
            return torsion(self.conn, A, B)
        _check_dim(self.conn, A, B)
        return _contract(self._Ttab, (A, B), self.n)

    # Leibniz extensions, for a tensor given as a multilinear map of fields.

    def nabla_tensor(self, A: VectorField, S: Tensor) -> Tensor:
        """(nabla_A S)(X1..Xk) = nabla_A(S(X..)) - sum_i S(.., nabla_A X_i, ..)."""
        def out(*X):
            total = self.nabla(A, S(*X))
            for i in range(len(X)):
                moved = X[:i] + (self.nabla(A, X[i]),) + X[i + 1:]
                total = total - S(*moved)
            return total
        return out

    def curvature_action(self, A: VectorField, B: VectorField, S: Tensor) -> Tensor:
        """(R(A,B)S)(X1..Xk) = R(A,B)(S(X..)) - sum_i S(.., R(A,B)X_i, ..)."""
        def out(*X):
            total = self.R(A, B, S(*X))
            for i in range(len(X)):
                moved = X[:i] + (self.R(A, B, X[i]),) + X[i + 1:]
                total = total - S(*moved)
            return total
        return out

    def nabla_R(self, A, B, C, D) -> VectorField:
        if self.direct:
            return self.nabla_tensor(A, self.R)(B, C, D)
        _check_dim(self.conn, A, B, C, D)
        return _contract(self._dRtab, (A, B, C, D), self.n)

    def nabla_T(self, A, B, C) -> VectorField:
        if self.direct:
            return self.nabla_tensor(A, self.T)(B, C)
        _check_dim(self.conn, A, B, C)
        return _contract(self._dTtab, (A, B, C), self.n)

    def nabla_nabla_R(self, A, B, C, D, E) -> VectorField:
        """nabla_A applied to the tensor nabla_B R, evaluated on (C, D, E)."""
        return self.nabla_tensor(A, self.nabla_tensor(B, self.R))(C, D, E)

    def curvature_action_on_R(self, A, B, C, D, E) -> VectorField:
        return self.curvature_action(A, B, self.R)(C, D, E)

    def curvature_action_on_T(self, A, B, C, D) -> VectorField:
        return self.curvature_action(A, B, self.T)(C, D)


# -- identity table ----------------------------------------------------------

def _cyc(labels: str, summand: Callable, fields: Mapping[str, VectorField], n: int,
         extra: Sequence[VectorField] = ()) -> VectorField:
    """Cyclic sum over ``labels`` built with the tuple-sum machinery."""
    ts = cyclic_sum(TupleSum.singleton(tuple(labels)), tuple(labels))
    return instantiate(ts, lambda t: summand(*[fields[x] for x in t], *extra),
                       VectorField.zero(n))


def _id_2_2(c: Calculus, f):
    A, B, C = f["A"], f["B"], f["C"]
    return c.R(A, B, C) + c.R(B, A, C)


def _id_2_3(c: Calculus, f):
    def s(A, B, C, D):
        return c.nabla_R(A, B, C, D) + c.R(c.T(A, B), C, D)
    return _cyc("ABC", s, f, c.n, (f["D"],))


def _terms_2_5(c: Calculus, A, B, C, D, E):
    return (c.curvature_action_on_R(A, B, C, D, E)
            + c.R(c.R(A, B, C), D, E)
            + c.R(C, c.R(A, B, D), E))


def _terms_2_6(c: Calculus, A, B, C, D, E):
    AB, BC, CD = lie_bracket(A, B), lie_bracket(B, C), lie_bracket(C, D)
    return (c.nabla_R(AB, C, D, E)
            + c.nabla_R(A, B, CD, E)
            + c.nabla_R(A, BC, D, E)
            - c.R(A, c.T(B, CD), E)
            - c.R(A, c.T(BC, D), E)
            + c.R(c.T(A, B), CD, E))


def _id_2_4(c: Calculus, f):
    def s(A, B, C, D, E):
        AB, BC, CD = lie_bracket(A, B), lie_bracket(B, C), lie_bracket(C, D)
        return (c.curvature_action_on_R(A, B, C, D, E)
                + c.nabla_R(AB, C, D, E)
                + c.nabla_R(A, B, CD, E)
                + c.nabla_R(A, BC, D, E)
                + c.R(A, c.R(C, B, D), E)
                + c.R(A, c.R(C, D, B), E)
                - c.R(A, c.T(B, CD), E)
                - c.R(A, c.T(BC, D), E)
                + c.R(c.T(A, B), CD, E))
    return _cyc("ABCD", s, f, c.n, (f["E"],))


def _id_2_5(c: Calculus, f):
    return _cyc("ABCD", lambda *x: _terms_2_5(c, *x), f, c.n, (f["E"],))


def _id_2_6(c: Calculus, f):
    return _cyc("ABCD", lambda *x: _terms_2_6(c, *x), f, c.n, (f["E"],))


def _id_2_6p(c: Calculus, f):
    def outer(A, B, C, D, E):
        inner = {"K": lie_bracket(C, D), "A": A, "B": B}

        def s(X, Y, Z):
            return c.nabla_R(X, Y, Z, E) + c.R(c.T(X, Y), Z, E)
        return _cyc("KAB", s, inner, c.n)
    return _cyc("ABCD", outer, f, c.n, (f["E"],))


def _id_2_7(c: Calculus, f):
    A, B = f["A"], f["B"]
    return c.T(A, B) + c.T(B, A)


def _id_2_8(c: Calculus, f):
    def s(A, B, C):
        return c.R(A, B, C) - c.nabla_T(A, B, C) - c.T(c.T(A, B), C)
    return _cyc("ABC", s, f, c.n)


def _id_2_9(c: Calculus, f):
    def s(A, B, C, D):
        return (c.R(A, B, c.T(C, D))
                - c.curvature_action_on_T(A, B, C, D)
                - c.T(c.R(A, B, C), D)
                - c.T(C, c.R(A, B, D)))
    return _cyc("ABCD", s, f, c.n)


def _id_2_9i(c: Calculus, f):
    # (nabla_A T)(nabla_B(C,D) + nabla_D(C,B)) with
    # nabla_X(Y,Z) := (nabla_X Y, Z) + (Y, nabla_X Z)
    def s(A, B, C, D):
        def dT(X, Y):
            return c.nabla_T(A, X, Y)
        return (dT(c.nabla(B, C), D) + dT(C, c.nabla(B, D))
                + dT(c.nabla(D, C), B) + dT(C, c.nabla(D, B)))
    return _cyc("ABCD", s, f, c.n)


@dataclass(frozen=True)
class GeometryIdentity:
    ident: str
    labels: str
    evaluate: Callable[[Calculus, Mapping[str, VectorField]], VectorField]
    description: str


GEOMETRY_IDENTITIES: dict[str, GeometryIdentity] = {g.ident: g for g in [
    GeometryIdentity("2.2", "ABC", _id_2_2, "R(A,B)C + R(B,A)C"),
    GeometryIdentity("2.3", "ABCD", _id_2_3,
                     "cyc<A,B,C> (nabla_A R)(B,C)D + R(T(A,B),C)D"),
    GeometryIdentity("2.4", "ABCDE", _id_2_4,
                     "cyc<A,B,C,D> of the combined curvature/commutator expression"),
    GeometryIdentity("2.5", "ABCDE", _id_2_5,
                     "cyc<A,B,C,D> (R(A,B)R)(C,D)E + R(R(A,B)C,D)E + R(C,R(A,B)D)E"),
    GeometryIdentity("2.6", "ABCDE", _id_2_6,
                     "cyc<A,B,C,D> of the commutator terms"),
    GeometryIdentity("2.6'", "ABCDE", _id_2_6p,
                     "cyc<A,B,C,D> cyc<[C,D],A,B> (nabla_X R)(Y,Z)E + R(T(X,Y),Z)E"),
    GeometryIdentity("2.7", "AB", _id_2_7, "T(A,B) + T(B,A)"),
    GeometryIdentity("2.8", "ABC", _id_2_8,
                     "cyc<A,B,C> R(A,B)C - (nabla_A T)(B,C) - T(T(A,B),C)"),
    GeometryIdentity("2.9", "ABCD", _id_2_9,
                     "cyc<A,B,C,D> R(A,B)(T(C,D)) - (R(A,B)T)(C,D) - T(R(A,B)C,D) "
                     "- T(C,R(A,B)D)"),
    GeometryIdentity("2.9i", "ABCD", _id_2_9i,
                     "cyc<A,B,C,D> (nabla_A T)(nabla_B(C,D) + nabla_D(C,B))"),
]}

ACCEPTANCE_GEOMETRY_IDS = ("2.2", "2.3", "2.5", "2.6", "2.6'", "2.7", "2.8", "2.9", "2.9i")

_ALIASES = {"2.6′": "2.6'", "2.6p": "2.6'", "2.6prime": "2.6'"}


def canonical_geometry_id(ident: str) -> str:
    ident = _ALIASES.get(ident.strip(), ident.strip())
    if ident not in GEOMETRY_IDENTITIES:
        raise KeyError(f"unknown geometry identity {ident!r}; "
                       f"known: {', '.join(GEOMETRY_IDENTITIES)}")
    return ident


def random_fields(rng: LCG, n: int, labels: str = "ABCDE", degree: int = 2,
                  coeff: int = 3) -> dict[str, VectorField]:
    return {x: VectorField([random_poly(rng, n, degree, coeff) for _ in range(n)])
            for x in labels}


def random_scenario(seed: int, index: int, degree: int = 2, coeff: int = 3,
                    dims: Sequence[int] = (2, 3)) -> tuple[Connection, dict[str, VectorField]]:
    """Scenario ``index`` of a seeded family; dimensions alternate through ``dims``."""
    rng = LCG(derive_seed(seed, index))
    n = dims[index % len(dims)]
    conn = Connection.random(rng, n, degree, coeff)
    return conn, random_fields(rng, n, "ABCDE", degree, coeff)


def evaluate_geometry_identity(conn: Connection, ident: str,
                               fields: Mapping[str, VectorField],
                               calculus: Calculus | None = None) -> VectorField:
    """The left side of identity ``ident`` as an exact vector field."""
    g = GEOMETRY_IDENTITIES[canonical_geometry_id(ident)]
    missing = [x for x in g.labels if x not in fields]
    if missing:
        raise KeyError(f"identity {g.ident} needs fields {', '.join(missing)}")
    _check_dim(conn, *fields.values())
    calc = calculus or Calculus(conn)
    return g.evaluate(calc, fields)


def verify_geometry_identity(conn: Connection, ident: str, trials: int = 1, seed: int = 0,
                             fields: Mapping[str, VectorField] | None = None,
                             degree: int = 2, coeff: int = 3,
                             calculus: Calculus | None = None) -> VerificationResult:
    """Evaluate the identity on ``fields`` (or on seeded random fields of
    degree <= ``degree``, one set per trial) and require the exact zero field."""
    ident = canonical_geometry_id(ident)
    calc = calculus or Calculus(conn)
    n_trials = 1 if fields is not None else trials
    for t in range(n_trials):
        if fields is not None:
            fs = dict(fields)
            rng = LCG(derive_seed(seed, t))
            for x in GEOMETRY_IDENTITIES[ident].labels:
                if x not in fs:
                    fs[x] = random_fields(rng, conn.dim, x, degree, coeff)[x]
        else:
            fs = random_fields(LCG(derive_seed(seed, t)), conn.dim, "ABCDE", degree, coeff)
        residual = evaluate_geometry_identity(conn, ident, fs, calc)
        if not residual.is_zero():
            used = GEOMETRY_IDENTITIES[ident].labels
            return VerificationResult(
                ident, False, t + 1,
                {"trial": t,
                 "fields": {x: fs[x].format() for x in used},
                 "residual": residual.format(),
                 "residual_terms": sum(len(c) for c in residual.components)},
                {"dim": conn.dim, "seed": seed})
    return VerificationResult(ident, True, n_trials, None, {"dim": conn.dim, "seed": seed})
