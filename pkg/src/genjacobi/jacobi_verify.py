"""Checks of the generalized Jacobi identities.

Three kinds of carrier are supported: the free associative algebra
(symbolic, a proof for all rings), integer matrices with the commutator,
and integer 3-vectors with the cross product.  A symmetric operation
``AB + BA`` on matrices is available as a negative control.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .free_algebra import FreeExpr, commutator, nested_commutator
from .index_bracket import (
    TupleSum,
    bracket_apply,
    canonical_labels,
    cyclic_sum,
    full_positions,
    instantiate,
    reversed_tail_term,
)
from .prng import LCG, derive_seed
from .results import VerificationResult

__all__ = [
    "RingInstance",
    "free_ring",
    "matrix_ring",
    "cross_product_ring",
    "anticommutator_ring",
    "ring_by_name",
    "nest",
    "jacobi_lhs",
    "verify_pth_jacobi_symbolic",
    "verify_pth_jacobi_matrix",
    "cyclic_identity_terms",
    "verify_identities_12_to_14",
    "verify_identity15_formal",
    "verify_reduction15",
    "antisymmetry_order_check",
]

ENTRY_RANGE = 9


@dataclass(frozen=True)
class RingInstance:
    """An additive group with a bilinear bracket and a way to draw elements."""

    kind: str
    dim: int
    bracket: Callable
    random_element: Callable[[LCG], object]
    is_zero: Callable[[object], bool]

    @property
    def name(self) -> str:
        return self.kind if self.kind in ("free", "cross3") else f"{self.kind}({self.dim})"


def _int_matrix(rng: LCG, dim: int) -> np.ndarray:
    vals = [[rng.randint(-ENTRY_RANGE, ENTRY_RANGE) for _ in range(dim)] for _ in range(dim)]
    return np.array(vals, dtype=object)


def _mat_commutator(a, b):
    return a.dot(b) - b.dot(a)


def _mat_anticommutator(a, b):
    return a.dot(b) + b.dot(a)


def _cross(a, b):
    return np.array([a[1] * b[2] - a[2] * b[1],
                     a[2] * b[0] - a[0] * b[2],
                     a[0] * b[1] - a[1] * b[0]], dtype=object)


def _array_zero(a) -> bool:
    return not np.any(a != 0)


def free_ring() -> RingInstance:
    counter = iter(range(1, 1 << 30))
    return RingInstance(
        "free", 0, commutator,
        lambda rng: FreeExpr.generator("A", next(counter)),
        lambda e: e.is_zero())


def matrix_ring(dim: int) -> RingInstance:
    if dim < 1:
        raise ValueError("matrix dimension must be positive")
    return RingInstance("matrix", dim, _mat_commutator,
                        lambda rng: _int_matrix(rng, dim), _array_zero)


def cross_product_ring() -> RingInstance:
    return RingInstance(
        "cross3", 3, _cross,
        lambda rng: np.array([rng.randint(-ENTRY_RANGE, ENTRY_RANGE) for _ in range(3)],
                             dtype=object),
        _array_zero)


def anticommutator_ring(dim: int) -> RingInstance:
    return RingInstance("anticommutator", dim, _mat_anticommutator,
                        lambda rng: _int_matrix(rng, dim), _array_zero)


def ring_by_name(name: str, dim: int = 2) -> RingInstance:
    if name == "free":
        return free_ring()
    if name == "matrix":
        return matrix_ring(dim)
    if name == "cross3":
        return cross_product_ring()
    if name == "anticommutator":
        return anticommutator_ring(dim)
    raise ValueError(f"unknown ring {name!r}")


def nest(bracket: Callable, elems: Sequence):
    """Right-nested bracket [e1, [e2, [..., [e_{p-1}, e_p]...]]]."""
    acc = elems[-1]
    for e in reversed(elems[:-1]):
        acc = bracket(e, acc)
    return acc


def jacobi_lhs(p: int, bracket: Callable, values: dict, labels=None):
    """Left side of the p-th identity: the full index bracket of the nested
    bracket, instantiated with ``values[label]``."""
    labels = labels or canonical_labels(p)
    ts = bracket_apply(TupleSum.singleton(labels), full_positions(p))
    return instantiate(ts, lambda t: nest(bracket, [values[x] for x in t])), ts


def verify_pth_jacobi_symbolic(p: int) -> VerificationResult:
    if p < 2:
        raise ValueError("p must be at least 2")
    labels = canonical_labels(p)
    gens = {x: FreeExpr.generator("A", k) for k, x in enumerate(labels, start=1)}
    lhs, ts = jacobi_lhs(p, commutator, gens, labels)
    rhs = nested_commutator([gens[x] for x in labels]) * p
    residual = lhs - rhs
    stats = {
        "bracket_terms": len(ts),
        "lhs_words": len(lhs),
        "rhs_words": len(rhs),
        "nested_words": len(rhs),
        "residual_terms": len(residual),
    }
    witness = None if residual.is_zero() else {"residual": str(residual)}
    return VerificationResult(f"1.1:p={p}", residual.is_zero(), 1, witness, stats)


def verify_pth_jacobi_matrix(p: int, dim: int, trials: int, seed: int,
                             elements: Sequence | None = None) -> VerificationResult:
    """Both sides of the p-th identity on random integer matrices, exactly.

    ``elements`` pins the matrices (one per index) and runs a single trial.
    """
    if p < 2 or dim < 1 or trials < 1:
        raise ValueError("need p >= 2, dim >= 1, trials >= 1")
    labels = canonical_labels(p)
    n_trials = 1 if elements is not None else trials
    for t in range(n_trials):
        if elements is not None:
            mats = [np.array(m, dtype=object) for m in elements]
            if len(mats) != p:
                raise ValueError(f"need {p} matrices, got {len(mats)}")
        else:
            rng = LCG(derive_seed(seed, t))
            mats = [_int_matrix(rng, dim) for _ in labels]
        values = dict(zip(labels, mats))
        lhs, _ = jacobi_lhs(p, _mat_commutator, values, labels)
        rhs = nest(_mat_commutator, mats) * p
        if not np.array_equal(lhs, rhs):
            return VerificationResult(
                f"1.1:p={p}", False, t + 1,
                {"trial": t, "matrices": mats, "lhs": lhs, "p_times_rhs": rhs},
                {"dim": dim, "seed": seed})
    return VerificationResult(f"1.1:p={p}", True, n_trials, None,
                              {"dim": dim, "seed": seed})


def cyclic_identity_terms(p: int) -> TupleSum:
    """The cyclic-sum tuple combination of the cyclic identities for p = 2, 3, 4.

    Each tuple stands for the right-nested bracket of its entries.
    """
    labels = canonical_labels(p)
    if p in (2, 3):
        base = TupleSum.singleton(labels)
    elif p == 4:
        base = reversed_tail_term(4)
    else:
        raise ValueError("cyclic identities are listed for p = 2, 3, 4")
    return cyclic_sum(base, labels)


_CYCLIC_IDS = {2: "1.2", 3: "1.3", 4: "1.4"}


def _check_cyclic(ring: RingInstance, p: int, trials: int, seed: int) -> VerificationResult:
    ts = cyclic_identity_terms(p)
    labels = canonical_labels(p)
    ident = _CYCLIC_IDS[p]
    n_trials = 1 if ring.kind == "free" else trials
    for t in range(n_trials):
        rng = LCG(derive_seed(seed, t))
        values = {x: ring.random_element(rng) for x in labels}
        total = instantiate(ts, lambda tup: nest(ring.bracket, [values[x] for x in tup]))
        if not ring.is_zero(total):
            return VerificationResult(
                ident, False, t + 1,
                {"ring": ring.name, "trial": t,
                 "elements": {k: str(v) if ring.kind == "free" else v for k, v in values.items()},
                 "residual": str(total) if ring.kind == "free" else total},
                {"seed": seed})
    return VerificationResult(ident, True, n_trials, None,
                              {"ring": ring.name, "seed": seed, "terms": len(ts)})


def verify_identities_12_to_14(ring: RingInstance, trials: int, seed: int,
                               upto: int = 4) -> list[VerificationResult]:
    return [_check_cyclic(ring, p, trials, seed) for p in range(2, upto + 1)]


def verify_identity15_formal(p: int) -> VerificationResult:
    """Bracket then cyclically sum the reversed-tail combination.

    An empty result proves the identity for any indexed family in any
    abelian group.  p = 2, 3, 4 are the cases claimed; larger p may be run
    for exploration.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    labels = canonical_labels(p)
    bracketed = bracket_apply(reversed_tail_term(p), full_positions(p))
    total = cyclic_sum(bracketed, labels)
    stats = {"bracketed_terms": len(bracketed), "residual_terms": len(total)}
    witness = None if total.is_zero() else {"residual": str(total)}
    return VerificationResult(f"1.5:p={p}", total.is_zero(), 1, witness, stats)


def verify_reduction15(p: int) -> VerificationResult:
    """Instantiate the reversed-tail cancellation in the free algebra and
    compare it with the cyclic identities for the same p.

    Two assignments are checked:

    * product words ``A_{i1..ip} = A_{i1}...A_{ip}``: before the cyclic sum
      the bracketed combination equals ``factor`` times the summand of the
      matching cyclic identity (factor 2, 2, 1 for p = 2, 3, 4), and after
      the cyclic sum the two expansions agree (both vanish);
    * nested commutators ``A_{i1..ip} = [A_{i1},[...]]``: the bracketed
      combination is ``p * factor`` times the same summand.
    """
    if p not in (2, 3, 4):
        raise ValueError("the reduction is stated for p = 2, 3, 4")
    labels = canonical_labels(p)
    gens = {x: FreeExpr.generator("A", k) for k, x in enumerate(labels, start=1)}
    bracketed = bracket_apply(reversed_tail_term(p), full_positions(p))

    def word(t):
        out = FreeExpr.unit()
        for x in t:
            out = out * gens[x]
        return out

    def nested(t):
        return nested_commutator([gens[x] for x in t])

    summand_ts = {2: TupleSum.singleton(labels), 3: TupleSum.singleton(labels),
                  4: reversed_tail_term(4)}[p]
    summand = instantiate(summand_ts, nested)
    factor = {2: 2, 3: 2, 4: 1}[p]

    checks = {}
    pre_words = instantiate(bracketed, word)
    checks["product_words_pre_cyclic"] = pre_words == summand * factor
    post_words = instantiate(cyclic_sum(bracketed, labels), word, FreeExpr.zero())
    target = instantiate(cyclic_identity_terms(p), nested, FreeExpr.zero())
    checks["product_words_post_cyclic"] = post_words == target * factor
    pre_nested = instantiate(bracketed, nested)
    checks["nested_pre_cyclic"] = pre_nested == summand * (p * factor)

    ok = all(checks.values())
    stats = {"factor": factor, "summand_words": len(summand), **checks}
    witness = None if ok else {
        "checks": checks,
        "product_word_expansion": str(pre_words),
        "expected": str(summand * factor),
    }
    return VerificationResult(f"1.5-reduction:p={p}", ok, 1, witness, stats)


def _sign_rule(ring: RingInstance, trials: int, seed: int):
    for t in range(trials):
        rng = LCG(derive_seed(seed, 1000 + t))
        a, b = ring.random_element(rng), ring.random_element(rng)
        lhs = ring.bracket(-a, b)
        rhs = -ring.bracket(a, b)
        diff = lhs - rhs
        if not ring.is_zero(diff):
            return {"trial": t, "a": a, "b": b}
    return None


def _jacobi_on_ring(ring: RingInstance, p: int, trials: int, seed: int):
    labels = canonical_labels(p)
    n_trials = 1 if ring.kind == "free" else trials
    for t in range(n_trials):
        rng = LCG(derive_seed(seed, 2000 + t))
        values = {x: ring.random_element(rng) for x in labels}
        lhs, _ = jacobi_lhs(p, ring.bracket, values, labels)
        residual = lhs - nest(ring.bracket, [values[x] for x in labels]) * p
        if not ring.is_zero(residual):
            return {"trial": t, "p": p,
                    "residual": str(residual) if ring.kind == "free" else residual}
    return None


def antisymmetry_order_check(ring: RingInstance, k: int, trials: int,
                             seed: int) -> VerificationResult:
    """Is the ring's bracket antisymmetric of order ``k``?

    Both characterizations are run and reported: the definition (the p-th
    identity for every p <= k) and the cyclic identities for p = 2..k.  The verdict is
    the cyclic-identity route; the stats record whether the two agree.
    """
    if not 2 <= k <= 4:
        raise ValueError("k must be 2, 3 or 4")
    ident = f"antisymmetry:k={k}"
    sign_fail = _sign_rule(ring, trials, seed)
    if sign_fail is not None:
        return VerificationResult(ident, False, trials,
                                  {"precondition": "[-A,B] = -[A,B] fails", **sign_fail},
                                  {"ring": ring.name, "precondition_violated": True})
    cyclic = verify_identities_12_to_14(ring, trials, seed, upto=k)
    definition = {p: _jacobi_on_ring(ring, p, trials, seed) for p in range(2, k + 1)}
    cyclic_ok = all(r.verified for r in cyclic)
    definition_ok = all(v is None for v in definition.values())
    stats = {
        "ring": ring.name,
        "seed": seed,
        "cyclic": {r.identity: r.verdict for r in cyclic},
        "definition": {f"1.1:p={p}": ("verified" if v is None else "violated")
                       for p, v in definition.items()},
        "characterizations_agree": cyclic_ok == definition_ok,
    }
    witness = None
    if not cyclic_ok:
        first = next(r for r in cyclic if not r.verified)
        witness = {"failed": first.identity, **first.witness}
    return VerificationResult(ident, cyclic_ok, trials, witness, stats)
