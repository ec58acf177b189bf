"""Per-geometry rules: universal axioms, hyperfree tuples, valency, extension classes."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import AbstractSet, Iterable

import networkx as nx

from .structure import Structure, StructureError, gaifman_graph, induced_substructure


@dataclass(frozen=True)
class Violation:
    axiom: str
    items: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return self.message


@dataclass(frozen=True, order=True)
class HyperfreeTuple:
    elements: tuple[str, ...]
    variant: str

    def key(self) -> tuple:
        return (len(self.elements), self.elements)


@dataclass(frozen=True)
class ExtensionClass:
    tag: str
    degree: int | None = None

    def __post_init__(self) -> None:
        if (self.tag == "algebraic") != (self.degree is not None):
            raise ValueError("degree is present exactly for algebraic extensions")
        if self.degree is not None and self.degree < 1:
            raise ValueError("degree must be positive")


# ---------------------------------------------------------------------------
# validation


def _shared(M: Structure, x: str, y: str) -> frozenset[str]:
    return M.inc(x) & M.inc(y)


def _shortest_cycle(G: nx.Graph) -> list[str]:
    best: list[str] | None = None
    for u, v in sorted(G.edges):
        G.remove_edge(u, v)
        try:
            path = nx.shortest_path(G, u, v)
            if best is None or len(path) < len(best):
                best = path
        except nx.NetworkXNoPath:
            pass
        G.add_edge(u, v)
    return best or []


def _validate_ngon(M: Structure) -> list[Violation]:
    n = M.kind.n
    G = gaifman_graph(M, "incidence")
    g = nx.girth(G)
    if g < 2 * n:
        cyc = _shortest_cycle(G)
        return [Violation("girth", tuple(cyc), f"girth {g} < {2 * n}")]
    return []


def _validate_steiner(M: Structure) -> list[Violation]:
    k, n = M.kind.k, M.kind.n
    out = []
    for b in M.blocks:
        if len(M.inc(b)) > n:
            out.append(Violation("block-size", (b,), f"block {b} has {len(M.inc(b))} > {n} points"))
    for b, c in combinations(M.blocks, 2):
        common = _shared(M, b, c)
        if len(common) >= k:
            out.append(Violation("k-set", (b, c) + tuple(sorted(common)),
                                 f"two blocks through a k-set: {b}, {c} share {sorted(common)}"))
    return out


def _net_class(M: Structure, line: str) -> str | None:
    labs = M.labels(line)
    return next(iter(labs)) if len(labs) == 1 else None


def _validate_net(M: Structure) -> list[Violation]:
    out = []
    for l in M.blocks:
        labs = M.labels(l)
        if len(labs) != 1:
            out.append(Violation("one-class", (l,), f"line {l} has {len(labs)} parallel classes"))
    for p in M.points:
        seen: dict[str, str] = {}
        for l in sorted(M.inc(p)):
            c = _net_class(M, l)
            if c is None:
                continue
            if c in seen:
                out.append(Violation("unique-line", (p, seen[c], l),
                                     f"point {p} lies on two {c} lines {seen[c]}, {l}"))
            else:
                seen[c] = l
    for l, m in combinations(M.blocks, 2):
        common = _shared(M, l, m)
        if len(common) > 1:
            out.append(Violation("unique-point", (l, m), f"lines {l}, {m} share {len(common)} points"))
    return out


def _par_class(M: Structure, l: str) -> frozenset[str]:
    return frozenset(M.leq_partners(l)) | {l}


def _validate_affine(M: Structure) -> list[Violation]:
    out = []
    for l in M.blocks:
        cls = _par_class(M, l)
        for m in sorted(cls - {l}):
            if _par_class(M, m) != cls:
                out.append(Violation("equivalence", (l, m), f"par is not transitive at {l}, {m}"))
                break
    for l, m in combinations(M.blocks, 2):
        common = _shared(M, l, m)
        if len(common) > 1:
            out.append(Violation("unique-line", (l, m), f"lines {l}, {m} share {len(common)} points"))
        elif common and m in M.leq_partners(l):
            out.append(Violation("parallel-meet", (l, m) + tuple(common),
                                 f"parallel lines {l}, {m} meet in {sorted(common)[0]}"))
    return out


def _tangent_at(M: Structure, b: str, p: str) -> frozenset[str]:
    """Blocks tangent to ``b`` at ``p`` (excluding ``b``)."""
    return frozenset(c for c, tails in M.leq_partners(b).items() if (p,) in tails)


def _validate_moebius(M: Structure) -> list[Violation]:
    out = []
    for name, args in sorted(M.tuples):
        if name == "tan":
            b0, b1, p = args
            if p not in M.inc(b0) or p not in M.inc(b1):
                out.append(Violation("tangent-incident", args, f"tan {b0} {b1} {p}: {p} is not on both blocks"))
            elif _shared(M, b0, b1) - {p}:
                q = sorted(_shared(M, b0, b1) - {p})[0]
                out.append(Violation("tangent-meet", args, f"blocks {b0}, {b1} touch at {p} but also share {q}"))
    for b in M.blocks:
        for p in sorted(M.inc(b)):
            cls = _tangent_at(M, b, p) | {b}
            for c in sorted(cls - {b}):
                if _tangent_at(M, c, p) | {c} != cls:
                    out.append(Violation("equivalence", (b, c, p), f"tangency at {p} not transitive at {b}, {c}"))
                    break
    for b, c in combinations(M.blocks, 2):
        common = _shared(M, b, c)
        if len(common) > 2:
            out.append(Violation("three-points", (b, c), f"blocks {b}, {c} share {len(common)} points"))
    # touching uniqueness: one block through q tangent to b at p
    for b in M.blocks:
        for p in sorted(M.inc(b)):
            touching = sorted(_tangent_at(M, b, p))
            for c, d in combinations(touching, 2):
                both = (_shared(M, c, d) - M.inc(b))
                if both:
                    q = sorted(both)[0]
                    out.append(Violation("unique-touching", (b, p, q, c, d),
                                         f"blocks {c}, {d} both pass {q} and touch {b} at {p}"))
    return out


def _validate_graph(M: Structure) -> list[Violation]:
    return [Violation("loop", args, f"loop at {args[0]}") for name, args in sorted(M.tuples) if args[0] == args[1]]


_VALIDATORS = {
    "projective": _validate_ngon,
    "ngon": _validate_ngon,
    "steiner": _validate_steiner,
    "net": _validate_net,
    "affine": _validate_affine,
    "moebius": _validate_moebius,
    "graph": _validate_graph,
}


def validate_T_forall(M: Structure) -> list[Violation]:
    """All violations of the universal axioms of ``M``'s kind; empty means valid."""
    return _VALIDATORS[M.kind.name](M)


def is_valid(M: Structure) -> bool:
    return not validate_T_forall(M)


# ---------------------------------------------------------------------------
# hyperfree tuples


def tangency_count(M: Structure, b: str, present: AbstractSet[str]) -> int:
    """Number of tangency classes at ``b``: points where some present block touches it."""
    pts = set()
    for c, tails in M.leq_partners(b).items():
        if c in present:
            pts.update(t[0] for t in tails if t[0] in present)
    return len(pts)


def valency_in(M: Structure, c: str, present: AbstractSet[str]) -> int:
    kind = M.kind.name
    if kind not in ("moebius", "graph"):
        raise StructureError(f"valency is defined for moebius and graph kinds, not {kind}")
    deg = len(M.inc(c) & present)
    if kind == "moebius" and M.sort_of(c) == "block":
        deg += tangency_count(M, c, present)
    return deg


def valency(B: Structure, c: str) -> int:
    """Incidences plus tangency classes (Möbius blocks) or neighbour count (graphs)."""
    B.sort_of(c)
    return valency_in(B, c, B.element_set)


def _single_variant(M: Structure, x: str, present: AbstractSet[str]) -> str | None:
    """Variant name if ``x`` alone is hyperfree inside ``present``, else None."""
    kind = M.kind.name
    d = len(M.inc(x) & present)
    is_point = M.sort_of(x) == M.kind.point_sort
    if kind == "graph":
        return "valency-bounded" if d <= M.kind.n else None
    if kind == "steiner":
        if is_point:
            return "point-bounded" if d <= 1 else None
        return "block-bounded" if d <= M.kind.k else None
    if kind == "net":
        if is_point:
            return "point-bounded" if d <= 2 else None
        return "line-bounded" if d <= 1 else None
    if kind == "affine":
        if is_point:
            return "point-bounded" if d <= 2 else None
        if d <= 1:
            return "line-bounded"
        if d == 2 and not any(y in present for y in M.leq_partners(x)):
            return "line-bounded"
        return None
    if kind == "moebius":
        if is_point:
            return "valency-bounded" if d <= 2 else None
        return "valency-bounded" if d + tangency_count(M, x, present) <= 3 else None
    # n-gons: loose ends here, arcs elsewhere
    if d <= 1:
        return "loose-end"
    if M.kind.n == 3 and d == 2:
        return "clean-arc"
    return None


def _arcs(M: Structure, present: AbstractSet[str], free: AbstractSet[str],
          starts: Iterable[str] | None = None) -> set[tuple[str, ...]]:
    """Clean arcs of length n-2 (n >= 4) made of ``free`` elements."""
    L = M.kind.n - 2

    def two(x: str) -> bool:
        return x in free and len(M.inc(x) & present) == 2

    out: set[tuple[str, ...]] = set()
    for s in (starts if starts is not None else free):
        if not two(s):
            continue
        # walk both ways collecting chains of length L through s
        stack = [(s,)]
        while stack:
            path = stack.pop()
            if len(path) == L:
                # s can sit anywhere in the chain, so extend from both ends
                out.add(min(path, path[::-1]))
                continue
            for end, prepend in ((path[-1], False), (path[0], True)):
                for y in sorted(M.inc(end) & present):
                    if y in path or not two(y):
                        continue
                    stack.append((y,) + path if prepend else path + (y,))
    return out


def hyperfree_in(M: Structure, present: AbstractSet[str], base: AbstractSet[str],
                 candidates: Iterable[str] | None = None) -> list[HyperfreeTuple]:
    """Hyperfree tuples of ``present`` lying in ``present - base``.

    When ``candidates`` is given only tuples touching those elements are
    reported (used for incremental peeling).
    """
    free = {x for x in present if x not in base}
    cand = free if candidates is None else {x for x in candidates if x in free}
    found: dict[tuple[str, ...], str] = {}
    for x in cand:
        v = _single_variant(M, x, present)
        if v is not None:
            found[(x,)] = v
    if M.kind.is_ngon and M.kind.n >= 4:
        for arc in _arcs(M, present, free, cand):
            found.setdefault(arc, "clean-arc")
    return sorted((HyperfreeTuple(t, v) for t, v in found.items()), key=HyperfreeTuple.key)


def hyperfree_tuples(B: Structure, A: Iterable[str]) -> list[HyperfreeTuple]:
    A = B.subset(A)
    return hyperfree_in(B, B.element_set, A)


def piece_sizes(kind) -> frozenset[int]:
    """Allowed piece sizes of an HF-order for the kind."""
    if kind.is_ngon:
        return frozenset({1, kind.n - 2})
    return frozenset({1})


# ---------------------------------------------------------------------------
# extension classes


def _has_edge_into(B: Structure, ext: AbstractSet[str], A: AbstractSet[str]) -> bool:
    return any(B.adj(x) & A for x in ext)


def algebraic_degree(B: Structure, A: frozenset[str], ext: tuple[str, ...]) -> int | None:
    """Degree of the one-step extension if algebraic by the kind's rules, else None.

    Assumes the extension is a minimal strong one.
    """
    kind = B.kind
    name = kind.name
    if name == "graph":
        return None
    if kind.is_ngon:
        if kind.n == 3:
            c = ext[0]
            return 1 if len(B.inc(c) & A) == 2 else None
        ends = set()
        for x in ext:
            ends |= B.inc(x) - set(ext)
        return 1 if len(ext) == kind.n - 2 and len(ends) == 2 and ends <= A else None
    (c,) = ext
    I = sorted(B.inc(c) & A)
    is_point = B.sort_of(c) == kind.point_sort
    if name == "steiner":
        if is_point:
            if len(I) == 1:
                j = len(B.inc(I[0]) & A)
                return kind.n - j
            return None
        return 1 if len(I) == kind.k else None
    if name == "net":
        if is_point:
            return 1 if len(I) == 2 else None
        return 1 if len(I) == 1 else None
    if name == "affine":
        if is_point:
            return 1 if len(I) == 2 else None
        parallel = any(y in A for y in B.leq_partners(c))
        if len(I) == 2 and not parallel:
            return 1
        if len(I) == 1 and parallel:
            return 1
        return None
    if name == "moebius":
        if is_point:
            if len(I) == 2:
                j = len(B.inc(I[0]) & B.inc(I[1]) & A)
                return 2 - j if j < 2 else None
            return None
        if len(I) == 3:
            return 1
        if len(I) == 2 and tangency_count(B, c, A | {c}) >= 1:
            return 1
        return None
    raise StructureError(f"unsupported kind {name}")


def classify_one_step(B: Structure, A: Iterable[str]) -> ExtensionClass:
    """Classify the extension ``A`` of ``B`` where ``B - A`` is one candidate tuple."""
    from .openness import is_open_over  # local import: openness builds on this module

    A = B.subset(A)
    ext = tuple(x for x in B.elements if x not in A)
    if not ext:
        raise StructureError("extension is empty")
    if len(ext) not in piece_sizes(B.kind):
        raise StructureError(f"extension of size {len(ext)} is not a candidate tuple")
    if is_open_over(B, A).verdict != "open":
        return ExtensionClass("not-strong")
    if len(ext) > 1:
        for r in range(1, len(ext)):
            for Q in combinations(ext, r):
                mid = A | set(Q)
                sub = induced_substructure(B, mid)
                if is_open_over(sub, A).verdict == "open" and is_open_over(B, mid).verdict == "open":
                    return ExtensionClass("not-minimal")
    if not _has_edge_into(B, set(ext), A):
        return ExtensionClass("trivial")
    deg = algebraic_degree(B, A, ext)
    if deg is not None:
        return ExtensionClass("algebraic", deg)
    return ExtensionClass("non-algebraic")


# ---------------------------------------------------------------------------
# non-degeneracy


def _no_common_block(M: Structure, pts: Iterable[str]) -> bool:
    pts = list(pts)
    common = None
    for p in pts:
        common = M.inc(p) if common is None else common & M.inc(p)
    return not common


def nondegeneracy_criterion(A: Structure) -> bool:
    """A sufficient syntactic condition for an infinite free completion."""
    name = A.kind.name
    P, L = A.points, A.blocks
    if name == "graph":
        return len(A) >= A.kind.n
    if name == "steiner":
        if len(L) >= 2:
            return True
        return any(_no_common_block(A, S) for S in combinations(P, A.kind.k + 1))
    if A.kind.is_ngon:
        G = gaifman_graph(A, "incidence")
        if len(A) == 0 or not nx.is_connected(G):
            return False
        if nx.diameter(G) >= A.kind.n + 2:
            return True
        target = 2 * A.kind.n + 2
        return any(len(c) == target for c in nx.simple_cycles(G, length_bound=target))
    if name == "net":
        if len(P) >= 2:
            return True
        if P and any(P[0] not in A.inc(l) for l in L):
            return True
        return any(A.labels(l) != A.labels(m) and not _shared(A, l, m) for l, m in combinations(L, 2))
    if name == "affine":
        for quad in combinations(P, 4):
            if all(_no_common_block(A, t) for t in combinations(quad, 3)):
                return True
        return False
    if name == "moebius":
        for b in L:
            on = A.inc(b)
            if len(on) >= 2 and len(on) < len(P):
                return True
        return False
    raise StructureError(f"unsupported kind {name}")


def is_nondegenerate(A: Structure, max_stages: int = 12, cap: int = 3000) -> bool:
    """Whether the free completion of ``A`` is infinite.

    Runs the completion until either the sufficient criterion holds on a
    prefix (infinite) or a full round of sub-steps adds nothing (finite).
    """
    from .construction import completion_step, substeps

    subs = substeps(A.kind)
    cur, idle, prov = A, 0, {}
    for s in range(max_stages + 1):
        if nondegeneracy_criterion(cur):
            return True
        if idle >= len(subs):
            return False
        if s == max_stages:
            break
        before = len(cur)
        cur, truncated = completion_step(cur, s + 1, prov, max(cap, len(A)), subs[s % len(subs)])
        if truncated:
            break
        idle = idle + 1 if len(cur) == before else 0
    raise StructureError("non-degeneracy undecided within the stage budget")
