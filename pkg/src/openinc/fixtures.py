"""Golden configurations shipped as data files, and the witness checker."""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from importlib import resources

from .construction import k_iterate
from .kinds import validate_T_forall
from .openness import HFOrder, is_open_over
from .structure import Structure, StructureError, gaifman_graph
from .textio import Document, parse

WITNESSES = ("steiner23-c6", "net3-c6", "moebius-c6")
AMALGAM_PARTS = ("ngon4-amalgam-fail-b", "ngon4-amalgam-fail-c", "ngon4-amalgam-fail-amalgam")
NAMES = WITNESSES + AMALGAM_PARTS + ("ngon4-amalgam-fail",)


class FixtureError(StructureError):
    pass


def _checksums() -> dict[str, str]:
    text = resources.files(__package__).joinpath("data", "SHA256SUMS").read_text()
    out = {}
    for line in text.splitlines():
        if line.strip():
            digest, name = line.split()
            out[name] = digest
    return out


def fixture_text(name: str) -> str:
    """Raw text of a fixture file, checked against its recorded digest."""
    fname = f"{name}.txt"
    sums = _checksums()
    if fname not in sums:
        raise FixtureError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")
    data = resources.files(__package__).joinpath("data", fname).read_bytes()
    if hashlib.sha256(data).hexdigest() != sums[fname]:
        raise FixtureError(f"checksum mismatch for fixture {name!r}")
    return data.decode("utf-8")


def load_document(name: str) -> Document:
    return parse(fixture_text(name))


@dataclass(frozen=True)
class WitnessConfig:
    structure: Structure
    order: tuple[str, ...]
    first: str
    second: str
    last: str

    @classmethod
    def from_document(cls, doc: Document) -> "WitnessConfig":
        if doc.order is None:
            raise FixtureError("witness document has no declared order")
        order = doc.order.order
        if sorted(order) != list(doc.structure.elements):
            raise FixtureError("declared order does not cover the structure")
        M = doc.structure
        if M.sort_of(order[0]) != M.sort_of(order[-1]):
            raise FixtureError("first and last elements differ in sort")
        return cls(M, order, order[0], order[1], order[-1])

    @property
    def hforder(self) -> HFOrder:
        return HFOrder.singletons(self.order)


@dataclass(frozen=True)
class AmalgamFixture:
    A: frozenset[str]
    B: Structure
    C: Structure
    amalgam: Structure


def builtin(name: str) -> WitnessConfig | AmalgamFixture | Structure:
    if name in WITNESSES:
        return WitnessConfig.from_document(load_document(name))
    if name in AMALGAM_PARTS:
        return load_document(name).structure
    if name == "ngon4-amalgam-fail":
        b, c, m = (load_document(p) for p in AMALGAM_PARTS)
        return AmalgamFixture(frozenset(b.subsets["A"]), b.structure, c.structure, m.structure)
    raise FixtureError(f"unknown fixture {name!r}; known: {', '.join(NAMES)}")


@dataclass
class C6Report:
    clause_a: bool
    clause_b: bool
    clause_c: dict[int, bool] = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.clause_a and self.clause_b and all(self.clause_c.values())

    def lines(self) -> list[str]:
        mark = lambda b: "pass" if b else "FAIL"
        out = [f"(a) {mark(self.clause_a)}", f"(b) {mark(self.clause_b)}"]
        out += [f"(c) k={k} {mark(v)}" for k, v in sorted(self.clause_c.items())]
        return out + self.notes


def verify_c6(w: WitnessConfig, k_max: int) -> C6Report:
    """Check the three finite clauses on a witness configuration."""
    M = w.structure
    if validate_T_forall(M):
        raise FixtureError("witness structure is not valid in its kind")
    notes = []
    strong = is_open_over(M, {w.first, w.second}).is_open
    edge = gaifman_graph(M).has_edge(w.first, w.second)
    a = strong and not edge
    if not a:
        notes.append(f"(a) strong={strong} edge={edge}")
    cert = is_open_over(M, {w.last})
    b = (not cert.is_open) and M.sort_of(w.last) == M.sort_of(w.first)
    if not b:
        notes.append(f"(b) {{{w.last}}} over-check verdict {cert.verdict}")
    c = {}
    for k in range(1, k_max + 1):
        I = k_iterate(M, k, w.order)
        bad = validate_T_forall(I)
        op = is_open_over(I).is_open
        c[k] = not bad and op
        if bad:
            notes.append(f"(c) k={k}: {bad[0]}")
        elif not op:
            notes.append(f"(c) k={k}: iterate is not open")
    return C6Report(a, b, c, notes)
