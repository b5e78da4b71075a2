"""Transports and formal connections on a family of vector bundles.

Every bundle in the family is trivialized by a unipotent polynomial frame
``F_a(x)``; the transport from bundle ``a`` at ``x`` to bundle ``b`` at
``y`` is ``H^{ab}(y, x) = F_b(y)^{-1} F_a(x)``.  A formal connection is
given by coefficient matrices ``Gamma^{ab}_alpha(y, x)``, one per base
direction, and acts on a section by

    (nabla^{ab}_V T)(y) = V^alpha(x) [H^{ab}(y,x) d_alpha T(x)
                                      + Gamma^{ab}_alpha(y,x) T(x)].

Sections that depend on several points are polynomials in blocks of
``n`` variables.  Block 0 is always the point where the section is
evaluated; each application of a transport or a derivative prepends a new
block and shifts the older ones back.  Restricting to the diagonal merges
blocks 0 and 1.  Two-point coefficient matrices use the layout (y, x):
variables 1..n are the target point, n+1..2n the source point.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Mapping, Sequence

from .exactmath import (DimensionError, Poly, PolyMatrix, ShapeError, dot,
                        unipotent_inverse)
from .index_bracket import TupleSum, bracket_apply, cyclic_sum, full_positions, instantiate
from .prng import LCG, derive_seed, random_poly, random_unipotent
from .results import VerificationResult

__all__ = [
    "LabelMismatch",
    "FrameFamily",
    "TransportModel",
    "TransportCoeffs",
    "FormalGamma",
    "GammaFamily",
    "Section",
    "BundleSection",
    "build_transports",
    "transport_section",
    "transport_op",
    "gen_cov_deriv",
    "transport_deriv",
    "diagonal_deriv",
    "consistent_gamma_from_diagonal",
    "check_consistency",
    "compose_two_point",
    "compose_diagonal",
    "k_coefficients",
    "curvature_components",
    "classical_curvature",
    "TransportScenario",
    "random_transport_scenario",
    "TRANSPORT_IDENTITIES",
    "verify_transport_identity",
]


class LabelMismatch(ValueError):
    pass


Field = tuple  # tuple[Poly, ...]: components V^alpha(x) of a base vector field


def _lift(obj, n: int, placement: Sequence[int], total_blocks: int):
    """Move block ``i`` of ``obj`` to block ``placement[i]`` of a
    ``total_blocks``-block variable space."""
    targets = [placement[b] * n + v for b in range(len(placement)) for v in range(1, n + 1)]
    return obj.remap(targets, total_blocks * n)


def _diag_targets(n: int, blocks: int) -> list[int]:
    """Targets merging blocks 0 and 1 of a ``blocks``-block space."""
    out = list(range(1, n + 1)) * 2
    for b in range(2, blocks):
        out += [(b - 1) * n + v for v in range(1, n + 1)]
    return out


# -- frames and transports ----------------------------------------------------

@dataclass(frozen=True, eq=False)
class FrameFamily:
    """Unipotent frames ``F_a(x)`` (``m x m``, polynomial in ``n`` variables)."""

    base_dim: int
    fiber_dim: int
    frames: Mapping[str, PolyMatrix]

    def __post_init__(self):
        if self.base_dim < 1 or self.fiber_dim < 1:
            raise DimensionError("base and fiber dimensions must be positive")
        if not self.frames:
            raise ValueError("a frame family needs at least one bundle label")
        for a, f in self.frames.items():
            if f.shape != (self.fiber_dim, self.fiber_dim):
                raise ShapeError(f"frame {a} has shape {f.shape}, "
                                 f"expected {self.fiber_dim}x{self.fiber_dim}")
            if f.nvars != self.base_dim:
                raise DimensionError(f"frame {a} is in {f.nvars} variables, "
                                     f"expected {self.base_dim}")
            if f.triangularity() is None:
                raise ShapeError(f"frame {a} is not unipotent triangular")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(self.frames)

    @classmethod
    def identity(cls, n: int, m: int, labels: Sequence[str]) -> "FrameFamily":
        return cls(n, m, {a: PolyMatrix.identity(m, n) for a in labels})

    @classmethod
    def random(cls, rng: LCG, n: int, m: int, labels: Sequence[str], degree: int = 1,
               coeff: int = 2) -> "FrameFamily":
        """Random frames, alternating upper and lower triangular by label."""
        return cls(n, m, {a: random_unipotent(rng, m, n, degree, coeff, lower=bool(i % 2))
                          for i, a in enumerate(labels)})


@dataclass(frozen=True, eq=False)
class TransportCoeffs:
    """``H^{ab}(y, x)`` and its source-point partials ``Hx[alpha]``."""

    source: str
    target: str
    base_dim: int
    H: PolyMatrix
    Hx: tuple[PolyMatrix, ...]


@dataclass(frozen=True, eq=False)
class FormalGamma:
    """Two-point coefficients ``Gamma^{ab}_alpha(y, x)``, one matrix per alpha."""

    source: str
    target: str
    base_dim: int
    coeffs: tuple[PolyMatrix, ...]

    def __post_init__(self):
        if len(self.coeffs) != self.base_dim:
            raise DimensionError(f"need {self.base_dim} coefficient matrices, "
                                 f"got {len(self.coeffs)}")
        for g in self.coeffs:
            if g.nvars != 2 * self.base_dim:
                raise DimensionError("two-point coefficients live in 2n variables")

    @cached_property
    def diagonal(self) -> tuple[PolyMatrix, ...]:
        """``Gamma_alpha(x, x)`` in ``n`` variables."""
        t = _diag_targets(self.base_dim, 2)
        return tuple(g.remap(t, self.base_dim) for g in self.coeffs)


class TransportModel:
    """Transport data derived from a frame family, computed lazily and cached."""

    def __init__(self, family: FrameFamily):
        self.family = family
        self.n = family.base_dim
        self.m = family.fiber_dim
        self._inv: dict = {}
        self._coeffs: dict = {}
        self._diag: dict = {}
        self._ddiag: dict = {}

    @property
    def labels(self) -> tuple[str, ...]:
        return self.family.labels

    def _check(self, *labels: str) -> None:
        for a in labels:
            if a not in self.family.frames:
                raise LabelMismatch(f"unknown bundle label {a!r}")

    def frame_inverse(self, a: str) -> PolyMatrix:
        if a not in self._inv:
            self._check(a)
            self._inv[a] = unipotent_inverse(self.family.frames[a])
        return self._inv[a]

    def coeffs(self, a: str, b: str) -> TransportCoeffs:
        key = (a, b)
        if key not in self._coeffs:
            self._check(a, b)
            n = self.n
            H = (_lift(self.frame_inverse(b), n, (0,), 2)
                 @ _lift(self.family.frames[a], n, (1,), 2))
            Hx = tuple(H.diff(n + al) for al in range(1, n + 1))
            self._coeffs[key] = TransportCoeffs(a, b, n, H, Hx)
        return self._coeffs[key]

    def H(self, a: str, b: str) -> PolyMatrix:
        return self.coeffs(a, b).H

    def H_diag(self, a: str, b: str) -> PolyMatrix:
        """``H^{ab}(x, x)``."""
        if (a, b) not in self._diag:
            self._diag[(a, b)] = self.H(a, b).remap(_diag_targets(self.n, 2), self.n)
        return self._diag[(a, b)]

    def dH_diag(self, a: str, b: str) -> tuple[PolyMatrix, ...]:
        """Total derivatives ``d H^{ab}(x, x) / dx^beta``."""
        if (a, b) not in self._ddiag:
            d = self.H_diag(a, b)
            self._ddiag[(a, b)] = tuple(d.diff(be) for be in range(1, self.n + 1))
        return self._ddiag[(a, b)]

    def Hx_diag(self, a: str, b: str) -> tuple[PolyMatrix, ...]:
        t = _diag_targets(self.n, 2)
        return tuple(h.remap(t, self.n) for h in self.coeffs(a, b).Hx)


def build_transports(frames: FrameFamily, a: str, b: str) -> TransportCoeffs:
    return TransportModel(frames).coeffs(a, b)


# -- sections -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Section:
    """Section of bundle ``label``; its components are polynomials in
    ``blocks * base_dim`` variables, evaluated at block 0."""

    label: str
    base_dim: int
    components: tuple[Poly, ...]
    blocks: int = 1

    def __post_init__(self):
        nv = self.blocks * self.base_dim
        for c in self.components:
            if c.nvars != nv:
                raise DimensionError(f"section component in {c.nvars} variables, "
                                     f"expected {nv}")

    @classmethod
    def of(cls, label: str, components: Sequence[Poly], n: int) -> "Section":
        return cls(label, n, tuple(components), 1)

    @property
    def fiber_dim(self) -> int:
        return len(self.components)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Section):
            return NotImplemented
        return (self.label, self.blocks, self.components) == (
            other.label, other.blocks, other.components)

    def __hash__(self) -> int:
        return hash((self.label, self.blocks, self.components))

    def _same(self, other: "Section") -> None:
        if (self.label, self.blocks, self.fiber_dim) != (other.label, other.blocks,
                                                         other.fiber_dim):
            raise LabelMismatch("sections of different bundles or point counts")

    def __add__(self, other: "Section") -> "Section":
        self._same(other)
        return Section(self.label, self.base_dim,
                       tuple(a + b for a, b in zip(self.components, other.components)),
                       self.blocks)

    def __sub__(self, other: "Section") -> "Section":
        return self + (-other)

    def __neg__(self) -> "Section":
        return Section(self.label, self.base_dim, tuple(-c for c in self.components),
                       self.blocks)

    def __mul__(self, f) -> "Section":
        """Pointwise multiple by a rational or a polynomial in the same variables."""
        return Section(self.label, self.base_dim, tuple(c * f for c in self.components),
                       self.blocks)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.components)

    def restrict_diagonal(self) -> "Section":
        """Identify the evaluation point with the previous one (y := x)."""
        if self.blocks < 2:
            raise ValueError("a one-point section has no diagonal to restrict to")
        t = _diag_targets(self.base_dim, self.blocks)
        nv = (self.blocks - 1) * self.base_dim
        return Section(self.label, self.base_dim,
                       tuple(c.remap(t, nv) for c in self.components), self.blocks - 1)

    def lift(self, placement: Sequence[int], total_blocks: int) -> "Section":
        return Section(self.label, self.base_dim,
                       tuple(_lift(c, self.base_dim, placement, total_blocks)
                             for c in self.components), total_blocks)

    def format(self) -> list[str]:
        n = self.base_dim
        if self.blocks == 1:
            names = [f"x{i}" for i in range(1, n + 1)]
        else:
            pts = ["x", "y", "z", "t", "u", "w"]
            pts = (pts[:self.blocks][::-1] if self.blocks <= len(pts)
                   else [f"p{b}" for b in range(self.blocks)])
            names = [f"{pts[b]}{i}" for b in range(self.blocks) for i in range(1, n + 1)]
        return [c.format(names) for c in self.components]


BundleSection = Section


def _check_field(V: Field, n: int) -> None:
    if len(V) != n or any(c.nvars != n for c in V):
        raise DimensionError(f"base vector field must have {n} components in {n} variables")


def transport_op(tc: TransportCoeffs, S: Section) -> Section:
    """``I`` applied to a (multi-point) section: a new evaluation point is
    prepended and the value is ``H(new, old) S(old, ...)``."""
    if S.label != tc.source:
        raise LabelMismatch(f"transport from {tc.source} applied to a section of {S.label}")
    n, k = tc.base_dim, S.blocks + 1
    H = _lift(tc.H, n, (0, 1), k)
    Sl = S.lift(tuple(range(1, k)), k)
    return Section(tc.target, n, H @ Sl.components, k)


def transport_section(tc: TransportCoeffs, T: Section, x: Sequence | None = None) -> Section:
    """``(I_x T)(y) = H(y, x) T(x)``.  With a point ``x`` the result is a
    one-point section in ``y``; without it, a two-point section in (y, x)."""
    out = transport_op(tc, T)
    if x is None:
        return out
    n = tc.base_dim
    if len(x) != n:
        raise DimensionError(f"point needs {n} coordinates")
    vals = {n + i + 1: v for i, v in enumerate(x)}
    comps = tuple(c.specialize(vals).remap(list(range(1, n + 1)) + [1] * n, n)
                  for c in out.components)
    return Section(tc.target, n, comps, 1)


def _apply(tc: TransportCoeffs, gammas: Sequence[PolyMatrix], V: Field, S: Section) -> Section:
    n, k = tc.base_dim, S.blocks + 1
    _check_field(V, n)
    H = _lift(tc.H, n, (0, 1), k)
    Vl = [_lift(v, n, (1,), k) for v in V]
    Sl = S.lift(tuple(range(1, k)), k).components
    out = [Poly.zero(k * n)] * len(Sl)
    for al in range(n):
        if Vl[al].is_zero():
            continue
        dS = [c.diff(n + al + 1) for c in Sl]
        G = _lift(gammas[al], n, (0, 1), k)
        inner = [a + b for a, b in zip(H @ dS, G @ Sl)]
        out = [o + Vl[al] * v for o, v in zip(out, inner)]
    return Section(tc.target, n, tuple(out), k)


def gen_cov_deriv(tc: TransportCoeffs, g: FormalGamma, V: Field, T: Section) -> Section:
    """The generalized covariant derivative; the result gains one point."""
    if not (tc.source == g.source == T.label and tc.target == g.target):
        raise LabelMismatch(f"labels {tc.source}->{tc.target}, {g.source}->{g.target} "
                            f"and section of {T.label} do not match")
    return _apply(tc, g.coeffs, V, T)


def transport_deriv(tc: TransportCoeffs, V: Field, T: Section) -> Section:
    """The derivative induced by the transport itself (Gamma = dH/dx)."""
    if tc.source != T.label:
        raise LabelMismatch(f"transport from {tc.source} applied to a section of {T.label}")
    return _apply(tc, tc.Hx, V, T)


def diagonal_deriv(model: TransportModel, g: FormalGamma, V: Field, T: Section) -> Section:
    """``(nabla_V T)(x, x)`` for a one-point section, from cached diagonals."""
    if T.blocks != 1 or g.source != T.label:
        raise LabelMismatch("diagonal derivative needs a one-point section of the source bundle")
    n = model.n
    _check_field(V, n)
    Hd = model.H_diag(g.source, g.target)
    Gd = g.diagonal
    out = [Poly.zero(n)] * len(T.components)
    for al in range(n):
        if V[al].is_zero():
            continue
        dT = [c.diff(al + 1) for c in T.components]
        inner = [a + b for a, b in zip(Hd @ dT, Gd[al] @ T.components)]
        out = [o + V[al] * v for o, v in zip(out, inner)]
    return Section(g.target, n, tuple(out), 1)


# -- families of formal connections ---------------------------------------------

class GammaFamily:
    """Formal connection coefficients for every ordered pair of labels."""

    def __init__(self, model: TransportModel, gammas: Mapping[tuple[str, str], FormalGamma],
                 kind: str = "custom"):
        self.model = model
        self.kind = kind
        self.gammas = dict(gammas)
        for (a, b), g in self.gammas.items():
            if (g.source, g.target) != (a, b):
                raise LabelMismatch(f"coefficients for {(a, b)} are labelled "
                                    f"{(g.source, g.target)}")

    def __getitem__(self, ab: tuple[str, str]) -> FormalGamma:
        try:
            return self.gammas[ab]
        except KeyError:
            raise LabelMismatch(f"no formal connection for labels {ab}") from None

    def deriv(self, a: str, b: str, V: Field, T: Section) -> Section:
        return gen_cov_deriv(self.model.coeffs(a, b), self[(a, b)], V, T)

    def bar(self, a: str, b: str, V: Field, T: Section) -> Section:
        return diagonal_deriv(self.model, self[(a, b)], V, T)

    @classmethod
    def from_diagonal(cls, model: TransportModel,
                      diag: Mapping[str, Sequence[PolyMatrix]]) -> "GammaFamily":
        """Consistent family ``Gamma^{ab}(y,x) = H^{ab}(y,x) gamma^a(x)``."""
        out = {}
        for a in model.labels:
            for b in model.labels:
                out[(a, b)] = consistent_gamma_from_diagonal(model.coeffs(a, b), diag[a])
        return cls(model, out, "consistent")

    @classmethod
    def transport_derivative(cls, model: TransportModel) -> "GammaFamily":
        out = {}
        for a in model.labels:
            for b in model.labels:
                tc = model.coeffs(a, b)
                out[(a, b)] = FormalGamma(a, b, model.n, tc.Hx)
        return cls(model, out, "transport")

    @classmethod
    def random_consistent(cls, model: TransportModel, rng: LCG, degree: int = 1,
                          coeff: int = 2) -> "GammaFamily":
        n, m = model.n, model.m
        diag = {a: tuple(PolyMatrix([[random_poly(rng, n, degree, coeff) for _ in range(m)]
                                     for _ in range(m)], n) for _ in range(n))
                for a in model.labels}
        return cls.from_diagonal(model, diag)

    @classmethod
    def random_generic(cls, model: TransportModel, rng: LCG, degree: int = 1,
                       coeff: int = 2) -> "GammaFamily":
        """Independent random two-point coefficients; not consistent in general."""
        n, m = model.n, model.m
        out = {}
        for a in model.labels:
            for b in model.labels:
                out[(a, b)] = FormalGamma(a, b, n, tuple(
                    PolyMatrix([[random_poly(rng, 2 * n, degree, coeff) for _ in range(m)]
                                for _ in range(m)], 2 * n) for _ in range(n)))
        return cls(model, out, "generic")

    def perturbed(self, a: str, b: str, alpha: int, i: int, j: int, delta: Poly) -> "GammaFamily":
        """Copy with ``delta`` added to entry (i, j) of ``Gamma^{ab}_alpha`` (1-based)."""
        g = self[(a, b)]
        mats = list(g.coeffs)
        rows = [list(r) for r in mats[alpha - 1].rows]
        rows[i - 1][j - 1] = rows[i - 1][j - 1] + delta
        mats[alpha - 1] = PolyMatrix(rows, 2 * self.model.n)
        new = dict(self.gammas)
        new[(a, b)] = FormalGamma(a, b, g.base_dim, tuple(mats))
        return GammaFamily(self.model, new, "perturbed")


def consistent_gamma_from_diagonal(tc: TransportCoeffs,
                                   diag: Sequence[PolyMatrix]) -> FormalGamma:
    """``Gamma^{ab}_alpha(y, x) = H^{ab}(y, x) gamma_alpha(x)`` where ``diag``
    holds ``gamma_alpha = Gamma^{aa}_alpha(x, x)`` in ``n`` variables."""
    n = tc.base_dim
    if len(diag) != n:
        raise DimensionError(f"need {n} diagonal coefficient matrices")
    return FormalGamma(tc.source, tc.target, n,
                       tuple(tc.H @ _lift(d, n, (1,), 2) for d in diag))


def _eval_matrix(M: PolyMatrix, point: Sequence) -> list[list]:
    return M.evaluate(point)


def _matmul_q(A: list[list], B: list[list]) -> list[list]:
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


def check_consistency(fam: GammaFamily, trials: int = 10, seed: int = 0) -> VerificationResult:
    """Consistency of the coefficients with the transports:
    ``Gamma^{ab}(z,x) = H^{cb}(z,y) Gamma^{ac}(y,x)`` for all label triples at
    random rational point triples, and its c = a corollary
    ``Gamma^{ab}(y,x) = H^{ab}(y,x) Gamma^{aa}(x,x)`` as a polynomial identity."""
    model = fam.model
    n = model.n
    labels = model.labels
    checked = 0
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        z, y, x = rng.point(n), rng.point(n), rng.point(n)
        for a, b, c in itertools.product(labels, repeat=3):
            Hcb = _eval_matrix(model.H(c, b), z + y)
            for al in range(n):
                lhs = _eval_matrix(fam[(a, b)].coeffs[al], z + x)
                rhs = _matmul_q(Hcb, _eval_matrix(fam[(a, c)].coeffs[al], y + x))
                checked += 1
                if lhs != rhs:
                    return VerificationResult("3.20", False, t + 1, {
                        "labels": [a, b, c], "alpha": al + 1,
                        "z": list(z), "y": list(y), "x": list(x),
                        "lhs": lhs, "rhs": rhs}, {"checks": checked})
    for a, b in itertools.product(labels, repeat=2):
        for al in range(n):
            lhs = fam[(a, b)].coeffs[al]
            rhs = model.H(a, b) @ _lift(fam[(a, a)].diagonal[al], n, (1,), 2)
            checked += 1
            if lhs != rhs:
                return VerificationResult("3.20", False, trials, {
                    "corollary": "c = a", "labels": [a, b], "alpha": al + 1,
                    "difference": (lhs - rhs).format(
                        [f"y{i}" for i in range(1, n + 1)] + [f"x{i}" for i in range(1, n + 1)])},
                    {"checks": checked})
    return VerificationResult("3.20", True, trials, None,
                              {"checks": checked, "point_triples": trials})


# -- compositions and curvature components -------------------------------------

def compose_two_point(fam: GammaFamily, chain: Sequence[str], W: Field, V: Field,
                      T: Section) -> tuple[Section, Section]:
    """``nabla^{bc}_W o nabla^{ab}_V T`` at (t, y, x): once by applying the
    derivative twice, once from the expanded two-point formula.  Returns
    (direct, formula)."""
    a, b, c = chain
    model = fam.model
    n = model.n
    direct = fam.deriv(b, c, W, fam.deriv(a, b, V, T))

    k = 3
    tbc, tab = model.coeffs(b, c), model.coeffs(a, b)
    Hbc = _lift(tbc.H, n, (0, 1), k)
    Hbc_y = [_lift(h, n, (0, 1), k) for h in tbc.Hx]          # d/dy of H^{bc}(t, y)
    Gbc = [_lift(g, n, (0, 1), k) for g in fam[(b, c)].coeffs]
    Gab = [_lift(g, n, (1, 2), k) for g in fam[(a, b)].coeffs]  # Gamma^{ab}(y, x)
    Wl = [_lift(w, n, (1,), k) for w in W]
    Vl = [_lift(v, n, (2,), k) for v in V]
    Tl = T.lift((2,), k).components
    # (nabla^{ab}_{d_gamma} T)(y) with x as source
    inner = [fam.deriv(a, b, tuple(Poly.constant(int(i == g), n) for i in range(n)), T)
             .lift((1, 2), k).components for g in range(n)]
    total = [Poly.zero(k * n)] * len(Tl)
    for al in range(n):
        for be in range(n):
            wv = Wl[al] * Vl[be]
            if wv.is_zero():
                continue
            dG = Gab[be].diff(n + al + 1)                       # d/dz Gamma(z, x) at z = y
            coefT = Hbc_y[al] @ Gab[be] + Hbc @ dG
            coefD = Gbc[al] - Hbc_y[al]
            part = [p + q for p, q in zip(coefT @ Tl, coefD @ inner[be])]
            total = [s + wv * p for s, p in zip(total, part)]
    return direct, Section(c, n, tuple(total), k)


def _field_apply(W: Field, V: Field, n: int) -> Field:
    """The vector field W(V) with components W(V^alpha)."""
    return tuple(dot(W, [V[al].diff(be + 1) for be in range(n)], n) for al in range(n))


def k_coefficients(fam: GammaFamily, chain: Sequence[str]) -> list:
    """``K[beta][alpha][gamma]`` (m x m matrices at (x, x)) for labels a, b, c."""
    a, b, c = chain
    model = fam.model
    n, m = model.n, model.m
    Hbc, Hab = model.H_diag(b, c), model.H_diag(a, b)
    dHab = model.dH_diag(a, b)
    Gab, Gbc = fam[(a, b)].diagonal, fam[(b, c)].diagonal
    zero = PolyMatrix.zeros(m, m, n)
    K = []
    for be in range(n):
        row = []
        for al in range(n):
            cell = []
            for ga in range(n):
                acc = zero
                if ga == al:
                    acc = acc + Hbc @ dHab[be] + Gbc[be] @ Hab
                if ga == be:
                    acc = acc + Hbc @ Gab[al]
                cell.append(acc)
            row.append(cell)
        K.append(row)
    return K


def compose_diagonal(fam: GammaFamily, chain: Sequence[str], W: Field, V: Field,
                     T: Section) -> tuple[Section, Section]:
    """The diagonal composition at (x, x), directly and from the expansion
    with the K coefficients.  Returns (direct, expansion)."""
    a, b, c = chain
    model = fam.model
    n, m = model.n, model.m
    direct = fam.bar(b, c, W, fam.bar(a, b, V, T))

    K = k_coefficients(fam, chain)
    Hbc, Hac = model.H_diag(b, c), model.H_diag(a, c)
    Gab, Gbc, Gaa = fam[(a, b)].diagonal, fam[(b, c)].diagonal, fam[(a, a)].diagonal
    dGab = [[g.diff(be + 1) for g in Gab] for be in range(n)]   # dGab[beta][alpha]
    nabla_aa = [fam.bar(a, a, _unit(g, n), T).components for g in range(n)]
    WV = _field_apply(W, V, n)
    first = Hbc @ fam.bar(a, b, WV, T).components
    total = list(first)
    for be in range(n):
        for al in range(n):
            wv = W[be] * V[al]
            if wv.is_zero():
                continue
            coef = Gbc[be] @ Gab[al] + Hbc @ dGab[be][al]
            for ga in range(n):
                coef = coef - K[be][al][ga] @ Gaa[ga]
            part = list(coef @ T.components)
            for ga in range(n):
                part = [p + q for p, q in zip(part, K[be][al][ga] @ nabla_aa[ga])]
            d2 = [t.diff(be + 1).diff(al + 1) for t in T.components]
            part = [p + q for p, q in zip(part, Hac @ d2)]
            total = [s + wv * p for s, p in zip(total, part)]
    return direct, Section(c, n, tuple(total), 1)


def _unit(g: int, n: int) -> Field:
    return tuple(Poly.constant(int(i == g), n) for i in range(n))


def _lie(W: Field, V: Field, n: int) -> Field:
    wv, vw = _field_apply(W, V, n), _field_apply(V, W, n)
    return tuple(p - q for p, q in zip(wv, vw))


def curvature_operator_lhs(fam: GammaFamily, chain: Sequence[str], W: Field, V: Field,
                           T: Section) -> Section:
    """Antisymmetrized diagonal composition minus the bracket term:
    nabla_W nabla_V T - nabla_V nabla_W T - I(nabla_[W,V] T), at (x, x)."""
    a, b, c = chain
    n = fam.model.n
    first = fam.bar(b, c, W, fam.bar(a, b, V, T))
    second = fam.bar(b, c, V, fam.bar(a, b, W, T))
    br = fam.bar(a, b, _lie(W, V, n), T)
    third = Section(c, n, fam.model.H_diag(b, c) @ br.components, 1)
    return first - second - third


@dataclass(frozen=True, eq=False)
class GenCurvatureComponents:
    """``R[beta][alpha]`` and ``D[beta][alpha][gamma]`` (m x m matrices, row
    j and column i) extracted from the operator, with the formula values
    ``R_formula`` and ``D_formula`` and the K coefficients."""

    labels: tuple[str, str, str]
    R: list
    D: list
    K: list
    R_formula: list
    D_formula: list


def curvature_components(fam: GammaFamily, chain: Sequence[str]) -> GenCurvatureComponents:
    a, b, c = chain
    model = fam.model
    n, m = model.n, model.m
    Gaa = fam[(a, a)].diagonal
    x = [Poly.variable(g + 1, n) for g in range(n)]
    basis = [Section.of(a, [Poly.constant(int(r == i), n) for r in range(m)], n)
             for i in range(m)]
    D = [[[None] * n for _ in range(n)] for _ in range(n)]
    R = [[None] * n for _ in range(n)]
    for be in range(n):
        for al in range(n):
            Wf, Vf = _unit(be, n), _unit(al, n)
            plain = [curvature_operator_lhs(fam, chain, Wf, Vf, e) for e in basis]
            for ga in range(n):
                cols = []
                for i, e in enumerate(basis):
                    moved = curvature_operator_lhs(fam, chain, Wf, Vf, e * x[ga])
                    cols.append([p - q * x[ga] for p, q in
                                 zip(moved.components, plain[i].components)])
                D[be][al][ga] = PolyMatrix([[cols[i][j] for i in range(m)] for j in range(m)], n)
            contraction = PolyMatrix.zeros(m, m, n)
            for ga in range(n):
                contraction = contraction + D[be][al][ga] @ Gaa[ga]
            P = PolyMatrix([[plain[i].components[j] for i in range(m)] for j in range(m)], n)
            R[be][al] = P - contraction
    K = k_coefficients(fam, chain)
    D_f = [[[K[be][al][ga] - K[al][be][ga] for ga in range(n)] for al in range(n)]
           for be in range(n)]
    Hbc = model.H_diag(b, c)
    Gab, Gbc = fam[(a, b)].diagonal, fam[(b, c)].diagonal

    def X(be, al):
        return Hbc @ Gab[al].diff(be + 1) + Gbc[be] @ Gab[al]

    R_f = [[None] * n for _ in range(n)]
    for be in range(n):
        for al in range(n):
            val = X(be, al) - X(al, be)
            for ga in range(n):
                val = val - D_f[be][al][ga] @ Gaa[ga]
            R_f[be][al] = val
    return GenCurvatureComponents((a, b, c), R, D, K, R_f, D_f)


def apply_curvatures(fam: GammaFamily, comps: GenCurvatureComponents, W: Field, V: Field,
                     T: Section) -> Section:
    """``R(W,V)T + D(W,V)T`` from the components."""
    a, _, c = comps.labels
    n, m = fam.model.n, fam.model.m
    nabla_aa = [fam.bar(a, a, _unit(g, n), T).components for g in range(n)]
    out = [Poly.zero(n)] * m
    for be in range(n):
        for al in range(n):
            wv = W[be] * V[al]
            if wv.is_zero():
                continue
            part = list(comps.R[be][al] @ T.components)
            for ga in range(n):
                part = [p + q for p, q in zip(part, comps.D[be][al][ga] @ nabla_aa[ga])]
            out = [o + wv * p for o, p in zip(out, part)]
    return Section(c, n, tuple(out), 1)


def classical_curvature(gamma: Sequence[PolyMatrix]) -> list:
    """``R[beta][alpha] = d_beta G_alpha - d_alpha G_beta + G_beta G_alpha
    - G_alpha G_beta`` for one-point coefficient matrices ``G``."""
    n = len(gamma)
    return [[gamma[al].diff(be + 1) - gamma[be].diff(al + 1)
             + gamma[be] @ gamma[al] - gamma[al] @ gamma[be]
             for al in range(n)] for be in range(n)]


# -- scenarios and the identity table ------------------------------------------

@dataclass
class TransportScenario:
    """Frames, formal connections and optional fixed inputs.

    ``chain`` names the labels (a, b, c, d) used by the composition checks.
    Fields and sections missing from ``fields`` / ``sections`` are drawn from
    the seeded generator with the given degree and coefficient bounds.
    """

    model: TransportModel
    gammas: GammaFamily
    chain: tuple[str, ...]
    fields: dict[str, Field] = field(default_factory=dict)
    sections: dict[str, Section] = field(default_factory=dict)
    field_degree: int = 1
    section_degree: int = 2
    coeff: int = 2
    seed: int | None = None

    def __post_init__(self):
        if len(self.chain) < 3:
            raise LabelMismatch("the label chain needs at least three labels")
        for a in self.chain:
            if a not in self.model.labels:
                raise LabelMismatch(f"chain label {a!r} is not a bundle label")

    @property
    def n(self) -> int:
        return self.model.n

    @property
    def m(self) -> int:
        return self.model.m

    def draw_field(self, rng: LCG, name: str) -> Field:
        if name in self.fields:
            return self.fields[name]
        return tuple(random_poly(rng, self.n, self.field_degree, self.coeff)
                     for _ in range(self.n))

    def draw_section(self, rng: LCG, label: str) -> Section:
        if label in self.sections:
            return self.sections[label]
        return Section.of(label, [random_poly(rng, self.n, self.section_degree, self.coeff)
                                  for _ in range(self.m)], self.n)


def random_transport_scenario(seed: int, index: int = 0, n: int | None = None,
                              m: int | None = None,
                              labels: Sequence[str] = ("a", "b", "c", "d"),
                              kind: str = "consistent", frame_degree: int = 1,
                              gamma_degree: int = 1, coeff: int = 2) -> TransportScenario:
    """Seeded scenario; ``kind`` is one of consistent, generic, transport,
    perturbed (consistent plus ``x1`` added to one entry of Gamma^{ab})."""
    rng = LCG(derive_seed(seed, index))
    n = n if n is not None else 1 + index % 2
    m = m if m is not None else 2 + (index // 2) % 2
    family = FrameFamily.random(rng, n, m, labels, frame_degree, coeff)
    model = TransportModel(family)
    if kind == "consistent":
        gammas = GammaFamily.random_consistent(model, rng, gamma_degree, coeff)
    elif kind == "generic":
        gammas = GammaFamily.random_generic(model, rng, gamma_degree, coeff)
    elif kind == "transport":
        gammas = GammaFamily.transport_derivative(model)
    elif kind == "perturbed":
        base = GammaFamily.random_consistent(model, rng, gamma_degree, coeff)
        gammas = base.perturbed(labels[0], labels[1], 1, 1, 1, Poly.variable(n + 1, 2 * n))
    else:
        raise ValueError(f"unknown scenario kind {kind!r}")
    return TransportScenario(model, gammas, tuple(labels))


def _fail(ident: str, trials: int, witness: dict, stats: dict | None = None):
    return VerificationResult(ident, False, trials, witness, stats or {})


def _ok(ident: str, trials: int, stats: dict | None = None):
    return VerificationResult(ident, True, trials, None, stats or {})


def _chain_triples(sc: TransportScenario) -> list[tuple[str, str, str]]:
    ch = sc.chain
    triples = [tuple(ch[i:i + 3]) for i in range(len(ch) - 2)]
    first = ch[0]
    if (first, first, first) not in triples:
        triples.append((first, first, first))
    return triples


def _id_3_2(sc: TransportScenario, trials: int, seed: int):
    model, n = sc.model, sc.n
    checks = 0
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        z, y, x = rng.point(n), rng.point(n), rng.point(n)
        for a, b, c in itertools.product(model.labels, repeat=3):
            lhs = _matmul_q(_eval_matrix(model.H(b, c), z + y), _eval_matrix(model.H(a, b), y + x))
            rhs = _eval_matrix(model.H(a, c), z + x)
            checks += 1
            if lhs != rhs:
                return _fail("3.2", t + 1, {"labels": [a, b, c], "z": list(z), "y": list(y),
                                            "x": list(x), "lhs": lhs, "rhs": rhs})
    return _ok("3.2", trials, {"checks": checks})


def _id_3_3(sc: TransportScenario, trials: int, seed: int):
    model, n = sc.model, sc.n
    for a in model.labels:
        if not model.H_diag(a, a).is_identity():
            return _fail("3.3", 1, {"label": a, "H_aa(x,x)": model.H_diag(a, a).format()})
    for t in range(trials):
        x = LCG(derive_seed(seed, t)).point(n)
        for a in model.labels:
            val = _eval_matrix(model.H(a, a), x + x)
            if any(val[i][j] != int(i == j) for i in range(sc.m) for j in range(sc.m)):
                return _fail("3.3", t + 1, {"label": a, "x": list(x), "value": val})
    return _ok("3.3", trials, {"labels": len(model.labels)})


def _all_triples(sc: TransportScenario):
    return list(itertools.product(sc.model.labels, repeat=3))


def _id_3_15(sc: TransportScenario, trials: int, seed: int):
    """nabla^I_V o I_y == 0: the transported section has no source dependence."""
    model = sc.model
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        V = sc.draw_field(rng, "V")
        for a, b, c in _all_triples(sc):
            T = sc.draw_section(rng, a)
            out = transport_deriv(model.coeffs(b, c), V, transport_op(model.coeffs(a, b), T))
            if not out.is_zero():
                return _fail("3.15", t + 1, {"labels": [a, b, c], "residual": out.format()})
    return _ok("3.15", trials, {"triples": len(_all_triples(sc))})


def _id_3_16(sc: TransportScenario, trials: int, seed: int):
    model = sc.model
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        V, W = sc.draw_field(rng, "V"), sc.draw_field(rng, "W")
        for a, b, c in _all_triples(sc):
            T = sc.draw_section(rng, a)
            out = transport_deriv(model.coeffs(b, c), V,
                                  transport_deriv(model.coeffs(a, b), W, T))
            if not out.is_zero():
                return _fail("3.16", t + 1, {"labels": [a, b, c], "residual": out.format()})
    return _ok("3.16", trials, {"triples": len(_all_triples(sc))})


def _id_3_17(sc: TransportScenario, trials: int, seed: int):
    model = sc.model
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        V = sc.draw_field(rng, "V")
        for a, b, c in _all_triples(sc):
            T = sc.draw_section(rng, a)
            lhs = transport_op(model.coeffs(b, c), transport_deriv(model.coeffs(a, b), V, T))
            rhs = transport_deriv(model.coeffs(a, c), V, T).lift((0, 2), 3)
            if lhs != rhs:
                return _fail("3.17", t + 1, {"labels": [a, b, c],
                                             "difference": (lhs - rhs).format()})
    return _ok("3.17", trials, {"triples": len(_all_triples(sc))})


def _id_3_20(sc: TransportScenario, trials: int, seed: int):
    return check_consistency(sc.gammas, trials, seed)


def _id_3_24(sc: TransportScenario, trials: int, seed: int):
    """nabla^{bc}_V o I^{ab}_y T = V^alpha (Gamma^{bc}_alpha - H^{bc}_alpha)(z,x)
    H^{ab}(x,y) T(y)."""
    model, n = sc.model, sc.n
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        V = sc.draw_field(rng, "V")
        for a, b, c in _chain_triples(sc):
            T = sc.draw_section(rng, a)
            direct = sc.gammas.deriv(b, c, V, transport_op(model.coeffs(a, b), T))
            k = 3
            Hab = _lift(model.H(a, b), n, (1, 2), k)
            Tl = T.lift((2,), k).components
            base = Hab @ Tl
            total = [Poly.zero(k * n)] * sc.m
            for al in range(n):
                M = (_lift(sc.gammas[(b, c)].coeffs[al], n, (0, 1), k)
                     - _lift(model.coeffs(b, c).Hx[al], n, (0, 1), k))
                v = _lift(V[al], n, (1,), k)
                total = [s + v * q for s, q in zip(total, M @ base)]
            formula = Section(c, n, tuple(total), k)
            if direct != formula:
                return _fail("3.24", t + 1, {"labels": [a, b, c],
                                             "difference": (direct - formula).format()})
    return _ok("3.24", trials)


def _id_3_26(sc: TransportScenario, trials: int, seed: int):
    """dH^{ab}(y,x)/dx = -H^{ab}(y,x) (d/dx H^{ba}(x,y)) H^{ab}(y,x)."""
    model, n = sc.model, sc.n
    swap = [n + v for v in range(1, n + 1)] + list(range(1, n + 1))
    for a, b in itertools.product(model.labels, repeat=2):
        tc = model.coeffs(a, b)
        Hba_xy = model.H(b, a).remap(swap, 2 * n)
        for al in range(n):
            rhs = -(tc.H @ Hba_xy.diff(n + al + 1) @ tc.H)
            if tc.Hx[al] != rhs:
                return _fail("3.26", 1, {"labels": [a, b], "alpha": al + 1,
                                         "lhs": tc.Hx[al].format(), "rhs": rhs.format()})
    return _ok("3.26", 1, {"pairs": len(model.labels) ** 2})


def _id_3_27(sc: TransportScenario, trials: int, seed: int):
    """nabla^{bc}_V o I_y = 0 for all V  <=>  Gamma^{bc} = dH^{bc}/dx.

    Both sides are decided for every label pair, for the scenario's
    connection and for the transport derivative of the same frames; the
    identity holds when the two sides agree in every case."""
    model, n, m = sc.model, sc.n, sc.m
    cases = {"scenario": sc.gammas, "transport": GammaFamily.transport_derivative(model)}
    outcomes = {}
    for name, fam in cases.items():
        for b, c in itertools.product(model.labels, repeat=2):
            a = b
            vanishes = True
            for al in range(n):
                for i in range(m):
                    e = Section.of(a, [Poly.constant(int(r == i), n) for r in range(m)], n)
                    out = fam.deriv(b, c, _unit(al, n), transport_op(model.coeffs(a, b), e))
                    if not out.is_zero():
                        vanishes = False
            equal = all(fam[(b, c)].coeffs[al] == model.coeffs(b, c).Hx[al] for al in range(n))
            outcomes[f"{name}:{b},{c}"] = (vanishes, equal)
            if vanishes != equal:
                return _fail("3.27", 1, {"case": name, "labels": [b, c],
                                         "composition_vanishes": vanishes,
                                         "gamma_equals_dH": equal})
    both = sum(1 for v, e in outcomes.values() if v and e)
    return _ok("3.27", 1, {"cases": len(outcomes), "both_true": both,
                           "both_false": len(outcomes) - both})


def _first_order_null(rng: LCG, x0: Sequence, n: int, m: int, label: str) -> Section:
    """A section vanishing with its first partials at ``x0``."""
    x = [Poly.variable(i + 1, n) - Poly.constant(x0[i], n) for i in range(n)]
    comps = []
    for _ in range(m):
        q = Poly.zero(n)
        for i in range(n):
            for j in range(i, n):
                q = q + x[i] * x[j] * random_poly(rng, n, 1, 2)
        comps.append(q)
    return Section.of(label, comps, n)


def _id_4_2(sc: TransportScenario, trials: int, seed: int):
    n, m = sc.n, sc.m
    a, b, c = sc.chain[:3]
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        W, V = sc.draw_field(rng, "W"), sc.draw_field(rng, "V")
        T = sc.draw_section(rng, a)
        direct, formula = compose_two_point(sc.gammas, (a, b, c), W, V, T)
        if direct != formula:
            return _fail("4.2", t + 1, {"labels": [a, b, c],
                                        "difference": (direct - formula).format()})
        # only T and its first partials at the source point enter
        x0 = rng.point(n)
        Q = _first_order_null(rng, x0, n, m, a)
        moved, _ = compose_two_point(sc.gammas, (a, b, c), W, V, T + Q)
        at = {2 * n + i + 1: x0[i] for i in range(n)}
        lhs = [p.specialize(at) for p in direct.components]
        rhs = [p.specialize(at) for p in moved.components]
        if lhs != rhs:
            return _fail("4.2", t + 1, {"labels": [a, b, c], "x0": list(x0),
                                        "note": "depends on second partials of T"})
    return _ok("4.2", trials, {"labels": [a, b, c]})


def _id_4_4(sc: TransportScenario, trials: int, seed: int):
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        W, V = sc.draw_field(rng, "W"), sc.draw_field(rng, "V")
        for chain in _chain_triples(sc):
            T = sc.draw_section(rng, chain[0])
            direct, expansion = compose_diagonal(sc.gammas, chain, W, V, T)
            if direct != expansion:
                return _fail("4.4", t + 1, {"labels": list(chain),
                                            "difference": (direct - expansion).format()})
    return _ok("4.4", trials, {"chains": [list(c) for c in _chain_triples(sc)]})


def _k_symmetric(K, n) -> bool:
    return all(K[be][al][ga] == K[al][be][ga]
               for be in range(n) for al in range(n) for ga in range(n))


def _id_4_6(sc: TransportScenario, trials: int, seed: int):
    model, n, m = sc.model, sc.n, sc.m
    zero = PolyMatrix.zeros(m, m, n)
    for a in model.labels:
        K = k_coefficients(sc.gammas, (a, a, a))
        G = sc.gammas[(a, a)].diagonal
        for be in range(n):
            for al in range(n):
                for ga in range(n):
                    want = ((G[al] if ga == be else zero) + (G[be] if ga == al else zero))
                    if K[be][al][ga] != want:
                        return _fail("4.6", 1, {"case": "a=b=c", "label": a,
                                                "indices": [be + 1, al + 1, ga + 1]})
        if not _k_symmetric(K, n):
            return _fail("4.6", 1, {"case": "a=b=c", "label": a})
    tfam = GammaFamily.transport_derivative(model)
    for chain in itertools.product(model.labels, repeat=3):
        K = k_coefficients(tfam, chain)
        Hac = model.Hx_diag(chain[0], chain[2])
        for be in range(n):
            for al in range(n):
                for ga in range(n):
                    want = ((Hac[al] if ga == be else zero) + (Hac[be] if ga == al else zero))
                    if K[be][al][ga] != want:
                        return _fail("4.6", 1, {"case": "transport derivative",
                                                "labels": list(chain),
                                                "indices": [be + 1, al + 1, ga + 1]})
    return _ok("4.6", 1, {"labels": len(model.labels)})


def _components(sc: TransportScenario, chain) -> GenCurvatureComponents:
    cache = sc.__dict__.setdefault("_component_cache", {})
    key = (id(sc.gammas), tuple(chain))
    if key not in cache:
        cache[key] = curvature_components(sc.gammas, chain)
    return cache[key]


def _id_4_7(sc: TransportScenario, trials: int, seed: int):
    for chain in _chain_triples(sc):
        comps = _components(sc, chain)
        for t in range(trials):
            rng = LCG(derive_seed(seed, t))
            W, V = sc.draw_field(rng, "W"), sc.draw_field(rng, "V")
            T = sc.draw_section(rng, chain[0])
            lhs = curvature_operator_lhs(sc.gammas, chain, W, V, T)
            rhs = apply_curvatures(sc.gammas, comps, W, V, T)
            if lhs != rhs:
                return _fail("4.7", t + 1, {"labels": list(chain),
                                            "difference": (lhs - rhs).format()})
    return _ok("4.7", trials, {"chains": len(_chain_triples(sc))})


def _id_4_9(sc: TransportScenario, trials: int, seed: int):
    n = sc.n
    for chain in _chain_triples(sc):
        comps = _components(sc, chain)
        for be in range(n):
            for al in range(n):
                if comps.R[be][al] != comps.R_formula[be][al]:
                    return _fail("4.9", 1, {"labels": list(chain), "component": "R",
                                            "indices": [be + 1, al + 1]})
                for ga in range(n):
                    if comps.D[be][al][ga] != comps.D_formula[be][al][ga]:
                        return _fail("4.9", 1, {"labels": list(chain), "component": "D",
                                                "indices": [be + 1, al + 1, ga + 1]})
    return _ok("4.9", 1, {"chains": len(_chain_triples(sc))})


def _id_4_10(sc: TransportScenario, trials: int, seed: int):
    model, n = sc.model, sc.n
    cases = [(sc.gammas, (a, a, a), "a=b=c") for a in model.labels]
    tfam = GammaFamily.transport_derivative(model)
    cases += [(tfam, chain, "transport derivative") for chain in _chain_triples(sc)]
    for fam, chain, name in cases:
        comps = curvature_components(fam, chain)
        for be in range(n):
            for al in range(n):
                for ga in range(n):
                    if not comps.D[be][al][ga].is_zero():
                        return _fail("4.10", 1, {"case": name, "labels": list(chain),
                                                 "indices": [be + 1, al + 1, ga + 1],
                                                 "D": comps.D[be][al][ga].format()})
    return _ok("4.10", 1, {"cases": len(cases)})


def _id_4_11(sc: TransportScenario, trials: int, seed: int):
    n = sc.n
    for chain in _chain_triples(sc):
        comps = _components(sc, chain)
        for be in range(n):
            for al in range(n):
                if comps.R[be][al] + comps.R[al][be] != PolyMatrix.zeros(sc.m, sc.m, n):
                    return _fail("4.11", 1, {"labels": list(chain), "component": "R",
                                             "indices": [be + 1, al + 1]})
                for ga in range(n):
                    s = comps.D[be][al][ga] + comps.D[al][be][ga]
                    if not s.is_zero():
                        return _fail("4.11", 1, {"labels": list(chain), "component": "D",
                                                 "indices": [be + 1, al + 1, ga + 1]})
    return _ok("4.11", 1, {"chains": len(_chain_triples(sc))})


def _id_4_12(sc: TransportScenario, trials: int, seed: int):
    """Cyclic identity for three derivatives along the chain a -> b -> c -> d,
    evaluated through triple compositions and through the curvature
    components; both groupings must vanish."""
    if len(sc.chain) < 4:
        raise LabelMismatch("the identity needs a chain of four labels")
    a, b, c, d = sc.chain[:4]
    fam, n = sc.gammas, sc.n
    abc, bcd = _components(sc, (a, b, c)), _components(sc, (b, c, d))
    ts = cyclic_sum(bracket_apply(TupleSum.singleton(("A", "B", "C")), full_positions(3)),
                    ("A", "B", "C"))
    zero = Section.of(d, [Poly.zero(n)] * sc.m, n)
    for t in range(trials):
        rng = LCG(derive_seed(seed, t))
        F = {x: sc.draw_field(rng, x) for x in "ABC"}
        T = sc.draw_section(rng, a)

        def triple(tup):
            X, Y, Z = (F[s] for s in tup)
            return fam.bar(c, d, X, fam.bar(b, c, Y, fam.bar(a, b, Z, T)))

        grouped_by_composition = instantiate(ts, triple, zero)

        def summand(A, B, C):
            inner = apply_curvatures(fam, abc, B, C, T)
            br = fam.bar(a, b, _lie(B, C, n), T)
            inner = inner + Section(c, n, fam.model.H_diag(b, c) @ br.components, 1)
            first = fam.bar(c, d, A, inner)
            S = fam.bar(a, b, A, T)
            second = apply_curvatures(fam, bcd, B, C, S)
            br2 = fam.bar(b, c, _lie(B, C, n), S)
            second = second + Section(d, n, fam.model.H_diag(c, d) @ br2.components, 1)
            return first - second

        grouped_by_components = instantiate(
            cyclic_sum(TupleSum.singleton(("A", "B", "C")), ("A", "B", "C")),
            lambda tup: summand(*(F[s] for s in tup)), zero)
        for name, val in (("compositions", grouped_by_composition),
                          ("components", grouped_by_components)):
            if not val.is_zero():
                return _fail("4.12", t + 1, {"labels": [a, b, c, d], "grouping": name,
                                             "residual": val.format()})
    return _ok("4.12", trials, {"labels": [a, b, c, d], "bracket_terms": len(ts)})


def _id_classical(sc: TransportScenario, trials: int, seed: int):
    """For a = b = c the generalized curvature is the classical curvature of
    Gamma^{aa}(x, x); it vanishes for the transport derivative."""
    model, n = sc.model, sc.n
    for a in model.labels:
        comps = curvature_components(sc.gammas, (a, a, a))
        cl = classical_curvature(sc.gammas[(a, a)].diagonal)
        if comps.R != cl:
            return _fail("classical", 1, {"label": a, "case": "classical formula"})
    tfam = GammaFamily.transport_derivative(model)
    for a in model.labels:
        comps = curvature_components(tfam, (a, a, a))
        if any(not comps.R[be][al].is_zero() for be in range(n) for al in range(n)):
            return _fail("classical", 1, {"label": a, "case": "transport derivative is flat"})
    generic_nonflat = 0
    if sc.gammas.kind != "transport":
        for a in model.labels:
            comps = curvature_components(sc.gammas, (a, a, a))
            if any(not comps.R[be][al].is_zero() for be in range(n) for al in range(n)):
                generic_nonflat += 1
    return _ok("classical", 1, {"labels": len(model.labels),
                                "nonflat_labels_in_scenario": generic_nonflat,
                                "scenario_equals_transport_derivative":
                                    sc.gammas.kind == "transport"})


@dataclass(frozen=True)
class TransportIdentity:
    ident: str
    check: Callable[[TransportScenario, int, int], VerificationResult]
    description: str
    default_trials: int = 1


TRANSPORT_IDENTITIES: dict[str, TransportIdentity] = {t.ident: t for t in [
    TransportIdentity("3.2", _id_3_2, "H^{bc}(z,y) H^{ab}(y,x) = H^{ac}(z,x)", 10),
    TransportIdentity("3.3", _id_3_3, "H^{aa}(x,x) = identity", 10),
    TransportIdentity("3.15", _id_3_15, "nabla^I_V o I_y = 0", 1),
    TransportIdentity("3.16", _id_3_16, "nabla^I_V o nabla^I_W = 0", 1),
    TransportIdentity("3.17", _id_3_17, "I_y o nabla^I_V = nabla^I_V", 1),
    TransportIdentity("3.20", _id_3_20, "Gamma^{ab}(z,x) = H^{cb}(z,y) Gamma^{ac}(y,x)", 10),
    TransportIdentity("3.24", _id_3_24, "nabla_V o I_y in coordinates", 1),
    TransportIdentity("3.26", _id_3_26, "dH/dx through the reverse transport", 1),
    TransportIdentity("3.27", _id_3_27, "nabla_V o I_y = 0 iff nabla = nabla^I", 1),
    TransportIdentity("4.2", _id_4_2, "two-point composition formula", 2),
    TransportIdentity("4.4", _id_4_4, "diagonal composition expansion with K", 2),
    TransportIdentity("4.6", _id_4_6, "K symmetric for a=b=c and for nabla^I", 1),
    TransportIdentity("4.7", _id_4_7, "operator equals R + D from components", 10),
    TransportIdentity("4.9", _id_4_9, "components match their closed formulas", 1),
    TransportIdentity("4.10", _id_4_10, "D = 0 for a=b=c and for nabla^I", 1),
    TransportIdentity("4.11", _id_4_11, "R and D antisymmetric", 1),
    TransportIdentity("4.12", _id_4_12, "cyclic identity for three derivatives", 2),
    TransportIdentity("classical", _id_classical, "a=b=c gives the classical curvature", 1),
]}


def verify_transport_identity(sc: TransportScenario, ident: str, trials: int | None = None,
                              seed: int = 0) -> VerificationResult:
    ident = ident.strip()
    if ident not in TRANSPORT_IDENTITIES:
        raise KeyError(f"unknown transport identity {ident!r}; "
                       f"known: {', '.join(TRANSPORT_IDENTITIES)}")
    entry = TRANSPORT_IDENTITIES[ident]
    n_trials = entry.default_trials if trials is None else trials
    res = entry.check(sc, n_trials, seed)
    res.stats.setdefault("n", sc.n)
    res.stats.setdefault("m", sc.m)
    res.stats.setdefault("gamma_kind", sc.gammas.kind)
    return res
