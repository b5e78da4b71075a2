"""Scenario files: line-oriented ``key = value`` text with bracketed sections.

Geometry scenario::

    kind = geometry
    dim = 2
    connection = given        # given | random ; random needs a seed
    symmetric = false         # random connections only

    [gamma]                   # k,a,b = Gamma^k_{ab}, a is the direction
    1,1,2 = x2

    [field A]                 # component = polynomial in x1..xn
    1 = x1
    2 = 1

    [generate]
    seed = 7
    degree = 2
    coeff = 3

Transport scenario::

    kind = transport
    dim = 2
    fiber = 2
    labels = a,b,c,d
    chain = a,b,c,d           # labels used by the composition checks
    frames = random           # random | identity, for labels without [frame]
    gamma = consistent        # consistent | transport | generic

    [frame a]                 # row,col = entry; unit diagonal is implied
    1,2 = x1 + x2

    [gamma a]                 # diagonal coefficients Gamma^{aa}(x,x): alpha,i,j
    1,1,2 = x1

    [gamma a,b]               # explicit two-point Gamma^{ab}(y,x): alpha,i,j
    1,2,1 = y1 - x1

    [perturb a,b]             # added to Gamma^{ab}(y,x) after construction
    1,1,1 = x1

    [field V]
    1 = x1

    [section a]
    1 = x1^2

    [generate]
    seed = 3
    frame_degree = 1
    gamma_degree = 1
    field_degree = 1
    degree = 2
    coeff = 2

Anything not given explicitly is drawn from the seeded generator; a file
that needs random data but names no seed can only be run with ``--seed``.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

from .exactmath import Poly, PolyMatrix
from .geometry import Connection, VectorField
from .polyparse import ParseError, format_poly, parse_poly
from .prng import LCG, derive_seed, random_poly, random_unipotent
from .transport import (FormalGamma, FrameFamily, GammaFamily, Section, TransportModel,
                        TransportScenario, consistent_gamma_from_diagonal)

__all__ = ["ScenarioError", "ScenarioFile", "parse_scenario", "load_scenario",
           "build_geometry", "build_transport"]


class ScenarioError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = ""):
        self.line = line
        self.column = column
        prefix = f"{source}:" if source else ""
        if line:
            prefix += f"{line}:{column}:"
        loc = f"{prefix} " if prefix else ""
        super().__init__(f"{loc}{message}")


@dataclass
class Entry:
    key: str
    value: str
    line: int
    value_col: int


@dataclass
class ScenarioFile:
    """The raw parsed file: top-level keys and sections keyed by header."""

    source: str
    text: str
    top: dict[str, Entry] = field(default_factory=dict)
    sections: dict[str, list[Entry]] = field(default_factory=dict)
    section_lines: dict[str, int] = field(default_factory=dict)

    def get(self, key: str, default: str | None = None) -> str | None:
        e = self.top.get(key)
        return e.value if e is not None else default

    def error(self, msg: str, entry: Entry | None = None, col: int | None = None):
        if entry is None:
            return ScenarioError(msg, source=self.source)
        return ScenarioError(msg, entry.line, col if col is not None else 1, self.source)

    @property
    def digest(self) -> str:
        return hashlib.sha256(self.text.encode()).hexdigest()


_HEADER = re.compile(r"^\[\s*([A-Za-z]+)(?:\s+([^\]]*?))?\s*\]$")


def parse_scenario(text: str, source: str = "") -> ScenarioFile:
    doc = ScenarioFile(source, text)
    current: str | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        indent = len(line) - len(line.lstrip())
        if stripped.startswith("["):
            m = _HEADER.match(stripped)
            if not m:
                raise ScenarioError("malformed section header", lineno, indent + 1, source)
            kind, arg = m.group(1).lower(), (m.group(2) or "").replace(" ", "")
            name = f"{kind} {arg}" if arg else kind
            if name in doc.sections:
                raise ScenarioError(f"section [{name}] defined twice", lineno, indent + 1, source)
            doc.sections[name] = []
            doc.section_lines[name] = lineno
            current = name
            continue
        if "=" not in line:
            raise ScenarioError("expected 'key = value'", lineno, indent + 1, source)
        key_part, value_part = line.split("=", 1)
        key = key_part.strip().replace(" ", "")
        if not key:
            raise ScenarioError("missing key before '='", lineno, indent + 1, source)
        value_col = len(key_part) + 2 + (len(value_part) - len(value_part.lstrip()))
        entry = Entry(key, value_part.strip(), lineno, value_col)
        bucket = doc.top if current is None else None
        if bucket is not None:
            if key in bucket:
                raise ScenarioError(f"key {key!r} defined twice", lineno, indent + 1, source)
            bucket[key] = entry
        else:
            sec = doc.sections[current]
            if any(e.key == key for e in sec):
                raise ScenarioError(f"{key!r} defined twice in [{current}]", lineno,
                                    indent + 1, source)
            sec.append(entry)
    if "kind" not in doc.top:
        raise ScenarioError("missing 'kind = geometry' or 'kind = transport'", source=source)
    return doc


def load_scenario(path: str) -> ScenarioFile:
    with open(path, encoding="utf-8") as fh:
        return parse_scenario(fh.read(), path)


def _int(doc: ScenarioFile, key: str, default: int | None = None, lo: int = 0) -> int:
    e = doc.top.get(key)
    if e is None:
        if default is None:
            raise doc.error(f"missing required key {key!r}")
        return default
    try:
        v = int(e.value)
    except ValueError:
        raise doc.error(f"{key} must be an integer", e, e.value_col) from None
    if v < lo:
        raise doc.error(f"{key} must be at least {lo}", e, e.value_col)
    return v


def _gen_int(doc: ScenarioFile, key: str, default: int) -> int:
    for e in doc.sections.get("generate", []):
        if e.key == key:
            try:
                return int(e.value)
            except ValueError:
                raise doc.error(f"{key} must be an integer", e, e.value_col) from None
    return default


def _gen_seed(doc: ScenarioFile) -> int | None:
    for e in doc.sections.get("generate", []):
        if e.key == "seed":
            try:
                return int(e.value)
            except ValueError:
                raise doc.error("seed must be an integer", e, e.value_col) from None
    return None


def _indices(doc: ScenarioFile, e: Entry, count: int, bounds: tuple[int, ...]) -> tuple[int, ...]:
    parts = e.key.split(",")
    if len(parts) != count:
        raise doc.error(f"key {e.key!r} needs {count} comma-separated indices", e, 1)
    out = []
    for p, b in zip(parts, bounds):
        if not p.isdigit() or not 1 <= int(p) <= b:
            raise doc.error(f"index {p!r} in {e.key!r} outside 1..{b}", e, 1)
        out.append(int(p))
    return tuple(out)


def _poly(doc: ScenarioFile, e: Entry, n: int, two_point: bool = False) -> Poly:
    try:
        return parse_poly(e.value, n, two_point)
    except ParseError as err:
        msg = str(err).rsplit(" at position", 1)[0]
        raise doc.error(f"{msg} (in {e.key!r})", e, e.value_col + err.pos) from None


def _section_names(doc: ScenarioFile, kind: str) -> list[str]:
    return [s.split(" ", 1)[1] for s in doc.sections if s.startswith(kind + " ")]


def _check_sections(doc: ScenarioFile, allowed: set[str]) -> None:
    for name, line in doc.section_lines.items():
        if name.split(" ", 1)[0] not in allowed:
            raise ScenarioError(f"unknown section [{name}]", line, 1, doc.source)


def _require_seed(doc: ScenarioFile, seed: int | None, what: str) -> int:
    if seed is None:
        raise doc.error(f"{what} are generated randomly; give a seed in [generate] or --seed")
    return seed


# -- geometry -------------------------------------------------------------------

@dataclass
class GeometryInputs:
    conn: Connection
    fields: dict[str, VectorField]
    degree: int
    coeff: int
    seed: int | None = None


def build_geometry(doc: ScenarioFile, seed: int | None = None) -> GeometryInputs:
    if doc.get("kind") != "geometry":
        raise doc.error("not a geometry scenario", doc.top["kind"])
    _check_sections(doc, {"gamma", "field", "generate"})
    n = _int(doc, "dim", lo=1)
    gen_seed = _gen_seed(doc)
    gen_seed = gen_seed if gen_seed is not None else seed
    degree, coeff = _gen_int(doc, "degree", 2), _gen_int(doc, "coeff", 3)
    mode = doc.get("connection", "given")
    if mode == "random":
        if "gamma" in doc.sections:
            raise doc.error("connection = random conflicts with a [gamma] section",
                             doc.top["connection"])
        rng = LCG(derive_seed(_require_seed(doc, gen_seed, "connection coefficients"), 0))
        conn = Connection.random(rng, n, degree, coeff, doc.get("symmetric", "false") == "true")
    elif mode == "given":
        entries = {}
        for e in doc.sections.get("gamma", []):
            k, a, b = _indices(doc, e, 3, (n, n, n))
            entries[(k, a, b)] = _poly(doc, e, n)
        conn = Connection.from_entries(n, entries)
    else:
        raise doc.error("connection must be 'given' or 'random'", doc.top["connection"])
    fields = {}
    for name in _section_names(doc, "field"):
        comps = [Poly.zero(n)] * n
        for e in doc.sections[f"field {name}"]:
            (i,) = _indices(doc, e, 1, (n,))
            comps[i - 1] = _poly(doc, e, n)
        fields[name] = VectorField(tuple(comps))
    return GeometryInputs(conn, fields, degree, coeff, gen_seed)


# -- transport ------------------------------------------------------------------

def _labels(doc: ScenarioFile, key: str, default=None) -> tuple[str, ...]:
    e = doc.top.get(key)
    if e is None:
        if default is None:
            raise doc.error(f"missing required key {key!r}")
        return default
    labels = tuple(x.strip() for x in e.value.split(",") if x.strip())
    if len(set(labels)) != len(labels) or not labels:
        raise doc.error(f"{key} must be distinct comma-separated labels", e, e.value_col)
    return labels


def build_transport(doc: ScenarioFile, seed: int | None = None) -> TransportScenario:
    if doc.get("kind") != "transport":
        raise doc.error("not a transport scenario", doc.top["kind"])
    _check_sections(doc, {"frame", "gamma", "perturb", "field", "section", "generate"})
    n = _int(doc, "dim", lo=1)
    m = _int(doc, "fiber", lo=1)
    labels = _labels(doc, "labels")
    chain = _labels(doc, "chain", labels)
    for a in chain:
        if a not in labels:
            raise doc.error(f"chain label {a!r} is not declared", doc.top["chain"])
    gen_seed = _gen_seed(doc)
    gen_seed = gen_seed if gen_seed is not None else seed
    frame_degree = _gen_int(doc, "frame_degree", 1)
    gamma_degree = _gen_int(doc, "gamma_degree", 1)
    coeff = _gen_int(doc, "coeff", 2)
    rng_holder: list[LCG] = []

    def rng(what: str) -> LCG:
        if not rng_holder:
            rng_holder.append(LCG(derive_seed(_require_seed(doc, gen_seed, what), 0)))
        return rng_holder[0]

    def check_label(name: str, line_key: str) -> None:
        if name not in labels:
            raise ScenarioError(f"[{line_key}] names undeclared label {name!r}",
                                doc.section_lines[line_key], 1, doc.source)

    frames_mode = doc.get("frames", "random")
    if frames_mode not in ("random", "identity"):
        raise doc.error("frames must be 'random' or 'identity'", doc.top["frames"])
    frames = {}
    for a in _section_names(doc, "frame"):
        check_label(a, f"frame {a}")
    for i, a in enumerate(labels):
        if f"frame {a}" in doc.sections:
            rows = [[Poly.constant(int(r == c), n) for c in range(m)] for r in range(m)]
            for e in doc.sections[f"frame {a}"]:
                r, c = _indices(doc, e, 2, (m, m))
                if r == c:
                    raise doc.error("frame diagonal entries are fixed to 1", e, 1)
                rows[r - 1][c - 1] = _poly(doc, e, n)
            frames[a] = PolyMatrix(rows, n)
        elif frames_mode == "identity":
            frames[a] = PolyMatrix.identity(m, n)
        else:
            frames[a] = random_unipotent(rng("frames"), m, n, frame_degree, coeff, bool(i % 2))
    try:
        family = FrameFamily(n, m, frames)
    except ValueError as err:
        raise doc.error(str(err)) from None
    model = TransportModel(family)

    pair_sections, diag_sections = {}, {}
    for arg in _section_names(doc, "gamma"):
        parts = arg.split(",")
        for a in parts:
            check_label(a, f"gamma {arg}")
        if len(parts) == 1:
            diag_sections[parts[0]] = doc.sections[f"gamma {arg}"]
        elif len(parts) == 2:
            pair_sections[(parts[0], parts[1])] = doc.sections[f"gamma {arg}"]
        else:
            raise ScenarioError(f"[gamma {arg}] needs one or two labels",
                                doc.section_lines[f"gamma {arg}"], 1, doc.source)

    gmode = doc.get("gamma", "consistent")
    kind = gmode
    if gmode == "transport":
        if diag_sections:
            raise doc.error("gamma = transport takes no [gamma a] sections", doc.top["gamma"])
        gammas = dict(GammaFamily.transport_derivative(model).gammas)
    elif gmode == "consistent":
        if pair_sections:
            raise doc.error("gamma = consistent is built from [gamma a] diagonal sections; "
                             "use gamma = generic for explicit pairs", doc.top.get("gamma"))
        gammas = {}
        diag = {}
        for a in labels:
            if a in diag_sections:
                mats = [[[Poly.zero(n)] * m for _ in range(m)] for _ in range(n)]
                for e in diag_sections[a]:
                    al, i, j = _indices(doc, e, 3, (n, m, m))
                    mats[al - 1][i - 1][j - 1] = _poly(doc, e, n)
                diag[a] = tuple(PolyMatrix(x, n) for x in mats)
            else:
                r = rng("diagonal connection coefficients")
                diag[a] = tuple(PolyMatrix([[random_poly(r, n, gamma_degree, coeff)
                                             for _ in range(m)] for _ in range(m)], n)
                                for _ in range(n))
        for a in labels:
            for b in labels:
                gammas[(a, b)] = consistent_gamma_from_diagonal(model.coeffs(a, b), diag[a])
    elif gmode == "generic":
        if diag_sections:
            raise doc.error("gamma = generic takes [gamma a,b] pair sections", doc.top["gamma"])
        gammas = {}
        for a in labels:
            for b in labels:
                if (a, b) in pair_sections:
                    mats = [[[Poly.zero(2 * n)] * m for _ in range(m)] for _ in range(n)]
                    for e in pair_sections[(a, b)]:
                        al, i, j = _indices(doc, e, 3, (n, m, m))
                        mats[al - 1][i - 1][j - 1] = _poly(doc, e, n, True)
                    gammas[(a, b)] = FormalGamma(a, b, n, tuple(PolyMatrix(x, 2 * n)
                                                                for x in mats))
                else:
                    r = rng("two-point connection coefficients")
                    gammas[(a, b)] = FormalGamma(a, b, n, tuple(
                        PolyMatrix([[random_poly(r, 2 * n, gamma_degree, coeff)
                                     for _ in range(m)] for _ in range(m)], 2 * n)
                        for _ in range(n)))
    else:
        raise doc.error("gamma must be consistent, transport or generic", doc.top["gamma"])

    fam = GammaFamily(model, gammas, kind)
    for arg in _section_names(doc, "perturb"):
        parts = arg.split(",")
        if len(parts) != 2:
            raise ScenarioError(f"[perturb {arg}] needs two labels",
                                doc.section_lines[f"perturb {arg}"], 1, doc.source)
        for a in parts:
            check_label(a, f"perturb {arg}")
        for e in doc.sections[f"perturb {arg}"]:
            al, i, j = _indices(doc, e, 3, (n, m, m))
            fam = fam.perturbed(parts[0], parts[1], al, i, j, _poly(doc, e, n, True))

    fields = {}
    for name in _section_names(doc, "field"):
        comps = [Poly.zero(n)] * n
        for e in doc.sections[f"field {name}"]:
            (i,) = _indices(doc, e, 1, (n,))
            comps[i - 1] = _poly(doc, e, n)
        fields[name] = tuple(comps)
    sections = {}
    for a in _section_names(doc, "section"):
        check_label(a, f"section {a}")
        comps = [Poly.zero(n)] * m
        for e in doc.sections[f"section {a}"]:
            (i,) = _indices(doc, e, 1, (m,))
            comps[i - 1] = _poly(doc, e, n)
        sections[a] = Section.of(a, comps, n)
    return TransportScenario(model, fam, chain, fields, sections,
                             field_degree=_gen_int(doc, "field_degree", 1),
                             section_degree=_gen_int(doc, "degree", 2), coeff=coeff,
                             seed=gen_seed)


def describe_transport(sc: TransportScenario) -> str:
    """Canonical text of a transport scenario, the input of its digest."""
    n = sc.n
    lines = [f"transport n={n} m={sc.m} labels={','.join(sc.model.labels)} "
             f"chain={','.join(sc.chain)} gamma={sc.gammas.kind}"]
    for a in sc.model.labels:
        lines.append(f"frame {a}: {sc.model.family.frames[a].format()}")
    for (a, b), g in sorted(sc.gammas.gammas.items()):
        lines.append(f"gamma {a},{b}: " + "; ".join(
            str([[format_poly(e, n, True) for e in row] for row in mat.rows])
            for mat in g.coeffs))
    for name, f in sorted(sc.fields.items()):
        lines.append(f"field {name}: {[format_poly(c, n) for c in f]}")
    for name, s in sorted(sc.sections.items()):
        lines.append(f"section {name}: {s.format()}")
    return "\n".join(lines)


def describe_geometry(conn: Connection, fields: dict[str, VectorField]) -> str:
    n = conn.dim
    lines = [f"geometry n={n}"]
    for k in range(n):
        for a in range(n):
            for b in range(n):
                lines.append(f"{k + 1},{a + 1},{b + 1} = {conn.gamma[k][a][b].format()}")
    for name, f in sorted(fields.items()):
        lines.append(f"field {name}: {f.format()}")
    return "\n".join(lines)


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()
