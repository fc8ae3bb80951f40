"""Plain-text formats for graded modules, Hecke pairs and displays.

All formats are line based; ``#`` starts a comment.  Matrices are written on
one line with rows separated by ``;`` and entries by ``|``; ``-`` is an empty
matrix (its shape is implied by the ranks).

Graded module::

    graded-module
    kind rees                  # or: filtered
    base witt 2 2              # field <q> | series <q> <K> | witt <q> <N>
    v (0,1)                    # rees only; default is the uniformizer
    window -1 1
    flags t_iso_below u_iso_above
    degree -1
    rank 1
    t 1                        # t: M_{j+1} -> M_j, omitted in the top degree
    u (0,1)                    # u: M_j -> M_{j+1}, rees only
    rel (0,1)                  # optional relation columns of a presented piece
    degree 0
    ...

Hecke pair (Laurent entries, Phi = matrix itself)::

    hecke
    q 2
    precision 10
    row z^-1 | 0
    row 0 | z^3 + z

Display::

    display
    q 2
    N 1
    d 1
    row (1) | (0)
    row (0) | (1)
"""

from __future__ import annotations

from .chain import ChainRing, SeriesChain, make_chain
from .errors import ParseError
from .fields import gf
from .graded_rees import FilteredChain, GradedReesModule, HeckePair, default_v, zeros
from .series import format_series, parse_terms, TruncSeries
from .witt_displays import Display, WittPair

REES_FLAGS = ("t_iso_below", "u_iso_above")
FILTERED_FLAGS = ("iso_below", "zero_above")


def _lines(text: str) -> list:
    out = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


def format_matrix(A: ChainRing, M) -> str:
    if not M or not M[0]:
        return "-"
    return " ; ".join(" | ".join(A.format(x) for x in row) for row in M)


def parse_matrix(A: ChainRing, text: str, rows: int, cols: int):
    text = text.strip()
    if text == "-":
        if rows and cols:
            raise ParseError(f"'-' given for a {rows}x{cols} matrix")
        return zeros(A, rows, cols)
    body = [[A.parse(x.strip()) for x in r.split("|")] for r in text.split(";")]
    if len(body) != rows or any(len(r) != cols for r in body):
        raise ParseError(f"expected a {rows}x{cols} matrix, got {text!r}")
    return body


def _base_line(A: ChainRing) -> str:
    if A.tag == "field":
        return f"base field {A.field.q}"
    return f"base {A.tag} {A.field.q} {A.K}"


def _parse_base(words: list) -> ChainRing:
    try:
        tag, q = words[0], int(words[1])
        K = int(words[2]) if len(words) > 2 else 1
    except (IndexError, ValueError) as exc:
        raise ParseError(f"bad base line {' '.join(words)!r}") from exc
    return make_chain(tag, q, K)


def dump_graded(m) -> str:
    A = m.base
    rees = isinstance(m, GradedReesModule)
    out = ["graded-module", f"kind {'rees' if rees else 'filtered'}", _base_line(A)]
    if rees:
        out.append(f"v {A.format(m.v)}")
        flags = [f for f in REES_FLAGS if getattr(m, f)]
    else:
        flags = [f for f in FILTERED_FLAGS if getattr(m, f)]
    out.append(f"window {m.j_min} {m.j_max}")
    out.append("flags " + " ".join(flags) if flags else "flags")
    for j in m.window():
        out.append(f"degree {j}")
        out.append(f"rank {m.ranks[j]}")
        if j < m.j_max:
            out.append(f"t {format_matrix(A, m.t[j])}")
            if rees:
                out.append(f"u {format_matrix(A, m.u[j])}")
        rel = m.rel(j)
        if rel and rel[0]:
            out.append(f"rel {format_matrix(A, rel)}")
    return "\n".join(out) + "\n"


def parse_graded(text: str):
    lines = _lines(text)
    if not lines or lines[0] != "graded-module":
        raise ParseError("missing 'graded-module' header")
    head, blocks, cur = {}, [], None
    for line in lines[1:]:
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        if key == "degree":
            cur = {"degree": int(rest)}
            blocks.append(cur)
        elif cur is None:
            head[key] = rest
        elif key in ("rank", "t", "u", "rel"):
            cur[key] = rest
        else:
            raise ParseError(f"unknown key {key!r} in a degree block")
    for need in ("kind", "base", "window"):
        if need not in head:
            raise ParseError(f"missing {need!r}")
    kind = head["kind"]
    if kind not in ("rees", "filtered"):
        raise ParseError(f"unknown kind {kind!r}")
    A = _parse_base(head["base"].split())
    j_min, j_max = (int(x) for x in head["window"].split())
    flags = set(head.get("flags", "").split())
    allowed = REES_FLAGS if kind == "rees" else FILTERED_FLAGS
    if flags - set(allowed):
        raise ParseError(f"unknown flags {sorted(flags - set(allowed))}")
    by_deg = {b["degree"]: b for b in blocks}
    if sorted(by_deg) != list(range(j_min, j_max + 1)):
        raise ParseError("degree blocks must cover the window exactly")
    ranks = {}
    for j, b in by_deg.items():
        if "rank" not in b:
            raise ParseError(f"missing rank in degree {j}")
        ranks[j] = int(b["rank"])
    t, u, rels = {}, {}, {}
    for j in range(j_min, j_max + 1):
        b = by_deg[j]
        if j < j_max:
            if "t" not in b:
                raise ParseError(f"missing t in degree {j}")
            t[j] = parse_matrix(A, b["t"], ranks[j], ranks[j + 1])
            if kind == "rees":
                if "u" not in b:
                    raise ParseError(f"missing u in degree {j}")
                u[j] = parse_matrix(A, b["u"], ranks[j + 1], ranks[j])
        if "rel" in b:
            ncols = len(b["rel"].split(";")[0].split("|"))
            rels[j] = parse_matrix(A, b["rel"], ranks[j], ncols)
    if kind == "rees":
        v = A.parse(head["v"]) if "v" in head else default_v(A)
        return GradedReesModule(A, v, j_min, j_max, ranks, t, u,
                                "t_iso_below" in flags, "u_iso_above" in flags, rels)
    return FilteredChain(A, j_min, j_max, ranks, t, "iso_below" in flags,
                         "zero_above" in flags, rels)


def dump_hecke(p: HeckePair) -> str:
    A = p.base
    out = ["hecke", f"q {A.field.q}", f"precision {A.K}"]
    for row in p.phi0:
        ents = []
        for x in row:
            coeffs = A.R.decode(x)
            terms = [(i - p.s, c) for i, c in enumerate(coeffs) if c]
            ents.append(_laurent(A, terms))
        out.append("row " + " | ".join(ents))
    return "\n".join(out) + "\n"


def _laurent(A: SeriesChain, terms) -> str:
    if not terms:
        return "0"
    parts = []
    for e, c in terms:
        cs = A.field.format(c)
        if e == 0:
            parts.append(cs)
            continue
        z = "z" if e == 1 else f"z^{e}"
        parts.append(z if cs == "1" else f"({cs})*{z}")
    return " + ".join(parts)


def parse_hecke(text: str) -> HeckePair:
    lines = _lines(text)
    if not lines or lines[0] != "hecke":
        raise ParseError("missing 'hecke' header")
    head, rows = {}, []
    for line in lines[1:]:
        key, _, rest = line.partition(" ")
        if key == "row":
            rows.append([x.strip() for x in rest.split("|")])
        else:
            head[key] = rest.strip()
    try:
        q, K = int(head["q"]), int(head["precision"])
    except (KeyError, ValueError) as exc:
        raise ParseError("hecke needs integer 'q' and 'precision'") from exc
    h = len(rows)
    if h == 0 or any(len(r) != h for r in rows):
        raise ParseError("hecke matrix must be square")
    F = gf(q)
    A = SeriesChain(F, K)
    parsed = [[parse_terms(x, F) for x in r] for r in rows]
    low = min((e for r in parsed for t in r for e, c in t.items() if c), default=0)
    s = max(0, -low)
    phi0 = []
    for r in parsed:
        out = []
        for terms in r:
            coeffs = [0] * K
            for e, c in terms.items():
                if not c:
                    continue
                if e + s >= K:
                    raise ParseError(f"term z^{e} lies beyond precision {K}")
                coeffs[e + s] = c
            out.append(A.R.encode(coeffs))
        phi0.append(out)
    return HeckePair(A, h, s, phi0)


def dump_display(D: Display) -> str:
    pr = D.pair
    W = pr.W
    out = ["display", f"q {pr.field.q}", f"N {pr.N}", f"d {pr.d}"]
    for row in D.psi:
        out.append("row " + " | ".join(W.format(x) for x in row))
    return "\n".join(out) + "\n"


def parse_display(text: str) -> Display:
    lines = _lines(text)
    if not lines or lines[0] != "display":
        raise ParseError("missing 'display' header")
    head, rows = {}, []
    for line in lines[1:]:
        key, _, rest = line.partition(" ")
        if key == "row":
            rows.append([x.strip() for x in rest.split("|")])
        else:
            head[key] = rest.strip()
    try:
        q, N, d = int(head["q"]), int(head["N"]), int(head["d"])
    except (KeyError, ValueError) as exc:
        raise ParseError("display needs integer 'q', 'N' and 'd'") from exc
    h = len(rows)
    pair = WittPair(gf(q), N, h, d)
    W = pair.W
    if any(len(r) != h for r in rows):
        raise ParseError("Psi must be square")
    psi = tuple(tuple(W.parse(x) for x in r) for r in rows)
    return Display(pair, psi)


def sniff(text: str) -> str:
    lines = _lines(text)
    return lines[0] if lines else ""


__all__ = [
    "dump_graded", "parse_graded", "dump_hecke", "parse_hecke", "dump_display",
    "parse_display", "format_matrix", "parse_matrix", "sniff",
]
