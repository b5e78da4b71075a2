"""Command-line front end: ``genjacobi bracket ...`` and ``genjacobi verify ...``.

Every verification command prints a report (JSON by default) and exits
with 0 when every result is verified, 1 when something is violated and 2
on usage, parse or scenario errors.
"""

from __future__ import annotations

import functools
import json
import time
from typing import Callable, Iterable

import click

from . import __version__
from .free_algebra import FreeExpr, nested_commutator
from .geometry import (ACCEPTANCE_GEOMETRY_IDS, GEOMETRY_IDENTITIES, Calculus,
                       canonical_geometry_id, random_scenario, verify_geometry_identity)
from .index_bracket import PositionError, TupleSum, bracket_apply, cyclic_sum, instantiate
from .jacobi_verify import (antisymmetry_order_check, ring_by_name, verify_identities_12_to_14,
                            verify_identity15_formal, verify_pth_jacobi_matrix,
                            verify_pth_jacobi_symbolic, verify_reduction15)
from .polyparse import ParseError
from .results import VerificationResult
from .scenario import (ScenarioError, build_geometry, build_transport, describe_geometry,
                       describe_transport, digest_text, load_scenario)
from .transport import TRANSPORT_IDENTITIES, random_transport_scenario, verify_transport_identity

TOOL = f"genjacobi {__version__}"


class UsageProblem(Exception):
    pass


# -- reports ----------------------------------------------------------------------

def build_report(results: list[VerificationResult], seed: int | None, digest: str,
                 timing: bool = True) -> dict:
    out = []
    for r in results:
        d = r.to_dict()
        if not timing:
            d["millis"] = 0
        out.append(d)
    return {"tool": TOOL, "seed": seed if seed is not None else 0,
            "scenario_digest": digest, "results": out}


def emit_report(report: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(report, indent=2, ensure_ascii=False)
    lines = [f"{report['tool']}  seed={report['seed']}  scenario={report['scenario_digest'][:16]}"]
    for r in report["results"]:
        lines.append(f"{r['verdict']:<9} {r['identity']:<22} trials={r['trials']:<3} "
                     f"{r['millis']} ms")
        if r["witness"] is not None:
            lines.append("  witness: " + json.dumps(r["witness"], ensure_ascii=False))
    n_bad = sum(r["verdict"] != "verified" for r in report["results"])
    lines.append(f"{len(report['results']) - n_bad} verified, {n_bad} violated")
    return "\n".join(lines)


def timed(fn: Callable[[], VerificationResult]) -> VerificationResult:
    t0 = time.perf_counter()
    res = fn()
    res.millis = int(round((time.perf_counter() - t0) * 1000))
    return res


# -- options shared by the group and every leaf command -------------------------------

def _common(f):
    f = click.option("--no-timing", is_flag=True, default=None,
                     help="Report millis as 0 so output is byte-stable.")(f)
    f = click.option("--trials", type=click.IntRange(min=1), default=None,
                     help="Random trials per check.")(f)
    f = click.option("--seed", type=int, default=None, help="Seed for every random draw.")(f)
    f = click.option("--output", type=click.Choice(["json", "text"]), default=None,
                     help="Report format (default json).")(f)
    return f


def _settings(ctx: click.Context, **local) -> dict:
    merged = dict(ctx.find_root().obj or {})
    for k, v in local.items():
        if v is not None:
            merged[k] = v
    merged.setdefault("output", "json")
    merged.setdefault("no_timing", False)
    return merged


def _leaf(fn):
    """Run a leaf command body, print its report and exit with the contract code."""

    @_common
    @click.pass_context
    @functools.wraps(fn)
    def wrapper(ctx, output, seed, trials, no_timing, **kwargs):
        st = _settings(ctx, output=output, seed=seed, trials=trials, no_timing=no_timing)
        try:
            results, digest = fn(st, **kwargs)
        except (UsageProblem, ScenarioError, ParseError, PositionError, KeyError,
                ValueError) as err:
            msg = err.args[0] if isinstance(err, KeyError) and err.args else str(err)
            click.echo(f"error: {msg}", err=True)
            ctx.exit(2)
        report = build_report(results, st.get("effective_seed", st.get("seed")), digest, timing=not st["no_timing"])
        click.echo(emit_report(report, st["output"]))
        ctx.exit(0 if all(r.verified for r in results) else 1)

    return wrapper


def _need_seed(st: dict, what: str) -> int:
    if st.get("seed") is None:
        raise UsageProblem(f"{what} is randomized; pass an explicit --seed")
    return st["seed"]


def _digest(*parts: str) -> str:
    return digest_text("\n".join(parts))


def _split_ids(ids: str | None, all_: bool, known: Iterable[str]) -> list[str]:
    if all_ and ids:
        raise UsageProblem("give either --identities or --all")
    if all_:
        return list(known)
    if not ids:
        raise UsageProblem("give --identities ID,... or --all")
    return [x.strip() for x in ids.split(",") if x.strip()]


# -- the command tree ---------------------------------------------------------------

@click.group()
@_common
@click.version_option(__version__, prog_name="genjacobi")
@click.pass_context
def main(ctx, output, seed, trials, no_timing):
    """Exact verification of generalized Jacobi, Bianchi and transport identities."""
    ctx.obj = {k: v for k, v in dict(output=output, seed=seed, trials=trials,
                                     no_timing=no_timing).items() if v is not None}


@main.group()
def bracket():
    """Multi-index bracket operations on index tuples."""


@bracket.command("expand")
@click.argument("labels")
@click.option("--positions", default=None,
              help="Bracket positions, e.g. 1,2,3 (default: every position).")
@click.option("--cyclic", "cyclic_labels", default=None,
              help="Afterwards sum over cyclic relabelings of these labels.")
@click.option("--commutators", is_flag=True,
              help="Also expand the result in the free algebra, reading each tuple "
                   "as a right-nested commutator.")
@click.option("--output", type=click.Choice(["json", "text"]), default=None)
@click.pass_context
def bracket_expand(ctx, labels, positions, cyclic_labels, commutators, output):
    """Bracket the tuple LABELS (comma separated, e.g. i,j,k)."""
    fmt = output or (ctx.find_root().obj or {}).get("output", "text")
    try:
        tup = tuple(x.strip() for x in labels.split(",") if x.strip())
        pos = (tuple(int(x) for x in positions.split(",")) if positions
               else tuple(range(1, len(tup) + 1)))
        ts = bracket_apply(TupleSum.singleton(tup), pos)
        if cyclic_labels:
            ts = cyclic_sum(ts, tuple(x.strip() for x in cyclic_labels.split(",")))
    except (PositionError, ValueError) as err:
        click.echo(f"error: {err}", err=True)
        ctx.exit(2)
    expansion = None
    if commutators:
        gens = {x: FreeExpr.generator("A", x) for x in dict.fromkeys(tup)}
        expansion = instantiate(ts, lambda t: nested_commutator([gens[x] for x in t]),
                                FreeExpr.zero())
    if fmt == "json":
        out = {"input": list(tup), "positions": list(pos), "result": str(ts),
               "terms": [{"tuple": list(t), "coeff": c} for t, c in ts.terms()]}
        if expansion is not None:
            out["free_algebra"] = str(expansion)
        click.echo(json.dumps(out, indent=2))
    else:
        click.echo(str(ts))
        if expansion is not None:
            click.echo(str(expansion))


@main.group()
def verify():
    """Run identity checks and print a report."""


@verify.command("jacobi")
@click.option("--p", "p", type=click.IntRange(min=2), required=True)
@click.option("--mode", type=click.Choice(["symbolic", "matrix"]), default="symbolic")
@click.option("--dim", type=click.IntRange(min=1), default=2, help="Matrix size.")
@_leaf
def verify_jacobi(st, p, mode, dim):
    """The p-th Jacobi identity for commutators."""
    if mode == "symbolic":
        return [timed(lambda: verify_pth_jacobi_symbolic(p))], _digest("jacobi", "symbolic", str(p))
    seed = _need_seed(st, "matrix mode")
    trials = st.get("trials") or 20
    res = timed(lambda: verify_pth_jacobi_matrix(p, dim, trials, seed))
    return [res], _digest("jacobi", "matrix", str(p), str(dim))


@verify.command("identity15")
@click.option("--p", "p", type=click.IntRange(min=2), required=True)
@click.option("--reduction", is_flag=True,
              help="Also instantiate with product words and compare with the "
                   "free-algebra cyclic identities.")
@_leaf
def verify_identity15(st, p, reduction):
    """Formal cancellation of the reversed-tail combination."""
    results = [timed(lambda: verify_identity15_formal(p))]
    if reduction:
        results.append(timed(lambda: verify_reduction15(p)))
    return results, _digest("identity15", str(p))


@verify.command("cyclic")
@click.option("--ring", type=click.Choice(["free", "matrix", "cross3", "anticommutator"]),
              default="free")
@click.option("--dim", type=click.IntRange(min=1), default=2)
@click.option("--upto", type=click.IntRange(2, 4), default=4)
@_leaf
def verify_cyclic(st, ring, dim, upto):
    """The three-, four- and five-fold cyclic identities on a ring."""
    r = ring_by_name(ring, dim)
    seed = 0 if ring == "free" else _need_seed(st, f"the {ring} ring")
    trials = st.get("trials") or 10
    t0 = time.perf_counter()
    results = verify_identities_12_to_14(r, trials, seed, upto)
    ms = int(round((time.perf_counter() - t0) * 1000 / max(len(results), 1)))
    for res in results:
        res.millis = ms
    return results, _digest("cyclic", ring, str(dim))


@verify.command("antisymmetry")
@click.option("--ring", type=click.Choice(["free", "matrix", "cross3", "anticommutator"]),
              required=True)
@click.option("--k", "k", type=click.IntRange(2, 4), required=True)
@click.option("--dim", type=click.IntRange(min=1), default=2)
@_leaf
def verify_antisymmetry(st, ring, k, dim):
    """Is the ring's bracket antisymmetric of order k?"""
    seed = _need_seed(st, "the antisymmetry check")
    trials = st.get("trials") or 10
    r = ring_by_name(ring, dim)
    return [timed(lambda: antisymmetry_order_check(r, k, trials, seed))], \
        _digest("antisymmetry", ring, str(dim), str(k))


@verify.command("geometry")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--random", "random_count", type=click.IntRange(min=1), default=None,
              help="Use this many seeded random scenarios instead of a file.")
@click.option("--identities", default=None, help="Comma-separated ids, e.g. 2.2,2.3.")
@click.option("--all", "all_", is_flag=True, help="Every acceptance identity.")
@_leaf
def verify_geometry(st, scenario_path, random_count, identities, all_):
    """Curvature and torsion identities on a polynomial connection."""
    ids = [canonical_geometry_id(i) for i in
           _split_ids(identities, all_, ACCEPTANCE_GEOMETRY_IDS)]
    trials = st.get("trials") or 1
    results = []
    if (scenario_path is None) == (random_count is None):
        raise UsageProblem("give exactly one of --scenario FILE or --random N")
    if scenario_path is not None:
        doc = load_scenario(scenario_path)
        inputs = build_geometry(doc, st.get("seed"))
        calc = Calculus(inputs.conn)
        seed = st.get("seed") if st.get("seed") is not None else inputs.seed
        st["effective_seed"] = seed
        for ident in ids:
            need = [x for x in GEOMETRY_IDENTITIES[ident].labels if x not in inputs.fields]
            if need and seed is None:
                raise UsageProblem(f"identity {ident} needs random fields "
                                   f"{','.join(need)}; pass an explicit --seed")
            results.append(timed(lambda: verify_geometry_identity(
                inputs.conn, ident, trials, seed or 0, fields=inputs.fields or None,
                degree=inputs.degree, coeff=inputs.coeff, calculus=calc)))
        return results, _digest(describe_geometry(inputs.conn, inputs.fields))
    seed = _need_seed(st, "--random")
    parts = []
    for index in range(random_count):
        conn, fields = random_scenario(seed, index)
        calc = Calculus(conn)
        parts.append(describe_geometry(conn, fields))
        for ident in ids:
            res = timed(lambda: verify_geometry_identity(conn, ident, 1, fields=fields,
                                                         calculus=calc))
            res.identity = f"{ident}@{index}"
            results.append(res)
    return results, _digest(*parts)


@verify.command("transport")
@click.option("--scenario", "scenario_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--random", "random_count", type=click.IntRange(min=1), default=None,
              help="Use this many seeded random scenarios instead of a file.")
@click.option("--kind", type=click.Choice(["consistent", "generic", "transport", "perturbed"]),
              default="consistent", help="Connection family for --random scenarios.")
@click.option("--identities", default=None, help="Comma-separated ids, e.g. 3.15,4.11.")
@click.option("--all", "all_", is_flag=True, help="Every transport identity.")
@_leaf
def verify_transport(st, scenario_path, random_count, kind, identities, all_):
    """Transport laws, consistency and generalized curvature identities."""
    ids = _split_ids(identities, all_, TRANSPORT_IDENTITIES)
    for ident in ids:
        if ident not in TRANSPORT_IDENTITIES:
            raise UsageProblem(f"unknown transport identity {ident!r}; known: "
                               f"{', '.join(TRANSPORT_IDENTITIES)}")
    if (scenario_path is None) == (random_count is None):
        raise UsageProblem("give exactly one of --scenario FILE or --random N")
    if scenario_path is not None:
        doc = load_scenario(scenario_path)
        scenarios = [build_transport(doc, st.get("seed"))]
    else:
        seed = _need_seed(st, "--random")
        scenarios = [random_transport_scenario(seed, i, kind=kind) for i in range(random_count)]
    results = []
    for index, sc in enumerate(scenarios):
        draw_seed = st.get("seed") if st.get("seed") is not None else sc.seed
        st.setdefault("effective_seed", draw_seed)
        for ident in ids:
            if draw_seed is None and _draws_randomly(sc, ident):
                raise UsageProblem(f"identity {ident} draws random inputs; pass an explicit "
                                   "--seed or give one in [generate]")
            res = timed(lambda: verify_transport_identity(sc, ident, st.get("trials"),
                                                          draw_seed or 0))
            if len(scenarios) > 1:
                res.identity = f"{ident}@{index}"
            results.append(res)
    return results, _digest(*(describe_transport(sc) for sc in scenarios))


_FIXED_INPUT_IDS = {"3.26", "3.27", "4.6", "4.9", "4.10", "4.11", "classical"}


def _draws_randomly(sc, ident: str) -> bool:
    """Whether the check draws random points, fields or sections."""
    if ident in _FIXED_INPUT_IDS:
        return False
    if ident in ("3.2", "3.3", "3.20", "4.2"):
        return True
    needed = {"3.15": ("V",), "3.16": ("V", "W"), "3.17": ("V",), "3.24": ("V",),
              "4.4": ("V", "W"), "4.7": ("V", "W"), "4.12": ("A", "B", "C")}
    fields_given = all(x in sc.fields for x in needed.get(ident, ()))
    sections_given = all(a in sc.sections for a in sc.model.labels)
    return not (fields_given and sections_given)


if __name__ == "__main__":
    main()
