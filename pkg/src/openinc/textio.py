"""Line-oriented text format for structures and JSON certificates.

Example::

    geometry steiner k=2 n=3
    sort point: p0 p1
    sort block: b0
    inc p0 b0
    inc p1 b0
    subset A: p0
    order: p0 p1 | b0
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .openness import Certificate, HFOrder
from .structure import Kind, Structure, StructureError, LOCAL_EQ


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.reason = message


@dataclass
class Document:
    structure: Structure
    subsets: dict[str, tuple[str, ...]] = field(default_factory=dict)
    order: HFOrder | None = None

    @property
    def kind(self) -> Kind:
        return self.structure.kind

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Document):
            return NotImplemented
        return (self.structure == other.structure and self.subsets == other.subsets
                and self.order == other.order)


_NUM = re.compile(r"(\d+)")


def natural_key(s: str) -> tuple:
    """Sort key that orders ``c2`` before ``c10``."""
    return tuple(int(t) if t.isdigit() else t for t in _NUM.split(s))


def _tokens(line: str) -> list[tuple[str, int]]:
    return [(m.group(), m.start() + 1) for m in re.finditer(r"[^\s:|]+|:|\|", line)]


def _parse_header(toks: list[tuple[str, int]], ln: int) -> Kind:
    if not toks or toks[0][0] != "geometry":
        col = toks[0][1] if toks else 1
        raise ParseError("expected 'geometry <class>' header", ln, col)
    if len(toks) < 2:
        raise ParseError("missing geometry class", ln, toks[0][1] + len("geometry"))
    params: dict[str, int] = {}
    for tok, col in toks[2:]:
        m = re.fullmatch(r"([knm])=(-?\d+)", tok)
        if not m:
            raise ParseError(f"bad parameter {tok!r}", ln, col)
        params[m.group(1)] = int(m.group(2))
    try:
        return Kind(toks[1][0], **params)
    except StructureError as e:
        raise ParseError(str(e), ln, toks[1][1]) from None


def parse(text: str) -> Document:
    """Parse a document; errors carry line and column."""
    kind: Kind | None = None
    sorts: dict[str, str] = {}
    tuples: list[tuple[str, tuple[str, ...]]] = []
    subsets: dict[str, tuple[str, ...]] = {}
    order: HFOrder | None = None

    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        toks = _tokens(line)
        if not toks:
            continue
        if kind is None:
            kind = _parse_header(toks, ln)
            continue
        head, hcol = toks[0]

        def ids_after(start: int) -> list[tuple[str, int]]:
            out = toks[start:]
            for tok, col in out:
                if tok in (":", "|"):
                    raise ParseError(f"unexpected {tok!r}", ln, col)
            return out

        def known(tok: str, col: int) -> str:
            if tok not in sorts:
                raise ParseError(f"unknown id {tok!r}", ln, col)
            return tok

        def colon(pos: int) -> None:
            if len(toks) <= pos or toks[pos][0] != ":":
                col = toks[pos][1] if len(toks) > pos else len(line) + 1
                raise ParseError("expected ':'", ln, col)

        if head == "sort":
            if len(toks) < 2:
                raise ParseError("missing sort name", ln, hcol + 4)
            sname, scol = toks[1]
            if sname not in kind.sorts:
                raise ParseError(f"unknown sort {sname!r} for {kind.name}", ln, scol)
            colon(2)
            for tok, col in ids_after(3):
                if tok in sorts:
                    raise ParseError(f"duplicate id {tok!r}", ln, col)
                sorts[tok] = sname
        elif head in ("inc", "rel"):
            if head == "inc":
                sym, args = kind.incidence_symbol, ids_after(1)
            else:
                if len(toks) < 2:
                    raise ParseError("missing relation symbol", ln, hcol + 3)
                sym, args = toks[1][0], ids_after(2)
                if sym not in kind.symbols:
                    raise ParseError(f"unknown relation symbol {sym!r}", ln, toks[1][1])
            symbol = kind.symbols[sym]
            if len(args) != symbol.arity:
                raise ParseError(f"{sym} expects {symbol.arity} arguments, got {len(args)}", ln, hcol)
            ids = tuple(known(t, c) for t, c in args)
            if symbol.kind != LOCAL_EQ and symbol.arity == 2 and symbol.profile[0] != symbol.profile[1]:
                got = sorted(sorts[i] for i in ids)
                if got != sorted(symbol.profile):
                    raise ParseError(f"{sym} needs one {symbol.profile[0]} and one {symbol.profile[1]}",
                                     ln, args[0][1])
            else:
                for (t, c), s in zip(args, symbol.profile):
                    if sorts[t] != s:
                        raise ParseError(f"{t!r} has sort {sorts[t]}, expected {s}", ln, c)
            tuples.append((sym, ids))
        elif head == "class":
            if len(toks) < 2:
                raise ParseError("missing class name", ln, hcol + 5)
            cname, ccol = toks[1]
            sym = kind.symbols.get(cname)
            if sym is None or sym.arity != 1:
                raise ParseError(f"unknown class {cname!r}", ln, ccol)
            for t, c in ids_after(2):
                known(t, c)
                if sorts[t] != sym.profile[0]:
                    raise ParseError(f"{t!r} has sort {sorts[t]}, expected {sym.profile[0]}", ln, c)
                tuples.append((cname, (t,)))
        elif head == "subset":
            if len(toks) < 2:
                raise ParseError("missing subset name", ln, hcol + 6)
            name, ncol = toks[1]
            if name in subsets:
                raise ParseError(f"duplicate subset {name!r}", ln, ncol)
            colon(2)
            ids = [known(t, c) for t, c in ids_after(3)]
            if len(set(ids)) != len(ids):
                raise ParseError("subset repeats an id", ln, ncol)
            subsets[name] = tuple(ids)
        elif head == "order":
            if order is not None:
                raise ParseError("duplicate order", ln, hcol)
            colon(1)
            pieces: list[list[str]] = [[]]
            bars = False
            for t, c in toks[2:]:
                if t == "|":
                    bars = True
                    pieces.append([])
                elif t == ":":
                    raise ParseError("unexpected ':'", ln, c)
                else:
                    pieces[-1].append(known(t, c))
            if bars:
                if any(not p for p in pieces):
                    raise ParseError("empty piece in order", ln, hcol)
                order = HFOrder(tuple(tuple(p) for p in pieces))
            else:
                order = HFOrder.singletons(pieces[0])
        else:
            raise ParseError(f"unknown directive {head!r}", ln, hcol)

    if kind is None:
        raise ParseError("empty document", 1, 1)
    try:
        M = Structure(kind, sorts, tuples)
    except StructureError as e:
        raise ParseError(str(e), 1, 1) from None
    return Document(M, subsets, order)


def _wrap(prefix: str, ids: list[str]) -> str:
    return " ".join([prefix] + ids) if ids else prefix


def serialize(doc: Document | Structure) -> str:
    if isinstance(doc, Structure):
        doc = Document(doc)
    M = doc.structure
    kind = M.kind
    lines = [kind.header()]
    for s in kind.sorts:
        ids = sorted(M.of_sort(s), key=natural_key)
        if ids:
            lines.append(_wrap(f"sort {s}:", ids))
    key = lambda t: (t[0], tuple(natural_key(a) for a in t[1]))
    unary: dict[str, list[str]] = {}
    for name, args in sorted(M.tuples, key=key):
        symbol = kind.symbols[name]
        if symbol.arity == 1:
            unary.setdefault(name, []).append(args[0])
        elif name == kind.incidence_symbol:
            lines.append(f"inc {args[0]} {args[1]}")
        else:
            lines.append(f"rel {name} {' '.join(args)}")
    for name in sorted(unary, key=natural_key):
        lines.append(_wrap(f"class {name}", sorted(unary[name], key=natural_key)))
    for name, ids in doc.subsets.items():
        lines.append(_wrap(f"subset {name}:", list(ids)))
    if doc.order is not None:
        pieces = doc.order.pieces
        sep = " " if all(len(p) == 1 for p in pieces) else " | "
        lines.append(("order: " + sep.join(" ".join(p) for p in pieces)).rstrip())
    return "\n".join(lines) + "\n"


def certificate_dict(cert: Certificate, kind: Kind) -> dict:
    order = list(cert.hforder.order) if cert.hforder else []
    pieces = [list(p) for p in cert.hforder.pieces] if cert.hforder else []
    return {
        "verdict": cert.verdict,
        "order": order,
        "pieces": pieces,
        "witness": sorted(cert.witness, key=natural_key),
        "kind": kind.as_dict(),
    }


def emit_certificate(cert: Certificate, kind: Kind) -> str:
    """Stable JSON for a certificate."""
    return json.dumps(certificate_dict(cert, kind), separators=(",", ":"))


def emit_json(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), sort_keys=True)
