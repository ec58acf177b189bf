"""Deciding strong extensions by hyperfree peeling, plus HF-orders and closures."""

from __future__ import annotations

import heapq
import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import AbstractSet, Iterable, Sequence

from .kinds import HyperfreeTuple, hyperfree_in, piece_sizes
from .structure import LOCAL_EQ, Structure, StructureError, induced_substructure


@dataclass(frozen=True)
class HFOrder:
    """A linear order of ``B - A`` cut into consecutive pieces."""

    pieces: tuple[tuple[str, ...], ...]

    @property
    def order(self) -> tuple[str, ...]:
        return tuple(x for p in self.pieces for x in p)

    @classmethod
    def singletons(cls, order: Iterable[str]) -> "HFOrder":
        return cls(tuple((x,) for x in order))

    def piece_index(self) -> dict[str, int]:
        return {x: i for i, p in enumerate(self.pieces) for x in p}


@dataclass(frozen=True)
class Certificate:
    verdict: str
    hforder: HFOrder | None = None
    witness: frozenset[str] = frozenset()

    @property
    def is_open(self) -> bool:
        return self.verdict == "open"


@dataclass
class PeelResult:
    removed: list[HyperfreeTuple] = field(default_factory=list)
    remaining: frozenset[str] = frozenset()


def peel(B: Structure, A: Iterable[str], rng: random.Random | None = None,
         within: Iterable[str] | None = None) -> PeelResult:
    """Remove hyperfree tuples until none is left.

    Without ``rng`` the least tuple (shortest, then lexicographic) goes first;
    with ``rng`` any currently hyperfree tuple may be picked.  ``within``
    peels the induced substructure on that set without building it.
    """
    A = B.subset(A)
    present = set(B.element_set) if within is None else set(B.subset(within)) | A
    current: dict[tuple[str, ...], HyperfreeTuple] = {t.elements: t for t in hyperfree_in(B, present, A)}
    heap = [t.key() for t in current.values()]
    heapq.heapify(heap)
    removed: list[HyperfreeTuple] = []
    while current:
        if rng is None:
            while True:
                _, elems = heapq.heappop(heap)
                if elems in current:
                    break
        else:
            elems = rng.choice(sorted(current))
        t = current.pop(elems)
        removed.append(t)
        present.difference_update(elems)
        touched = set()
        for x in elems:
            touched |= B.adj(x)
        touched &= present
        touched -= A
        stale = [k for k in current if any(x in touched or x not in present for x in k)]
        for k in stale:
            del current[k]
        for h in hyperfree_in(B, present, A, touched):
            if h.elements not in current:
                current[h.elements] = h
                if rng is None:
                    heapq.heappush(heap, h.key())
    return PeelResult(removed, frozenset(present - A))


def is_open_over(B: Structure, A: Iterable[str] = ()) -> Certificate:
    """Decide whether ``A`` is strong in ``B``; open verdicts carry an HF-order."""
    res = peel(B, A)
    if res.remaining:
        return Certificate("closed", witness=res.remaining)
    return Certificate("open", hforder=HFOrder(tuple(t.elements for t in reversed(res.removed))))


def is_strong(B: Structure, A: Iterable[str] = ()) -> bool:
    return not peel(B, A).remaining


def closed_witness_bruteforce(B: Structure, A: Iterable[str] = (), bound: int = 16) -> frozenset[str] | None:
    """Smallest-first search for a nonempty ``D`` with no hyperfree tuple in ``A u D``."""
    A = B.subset(A)
    free = [x for x in B.elements if x not in A]
    if len(free) > bound:
        raise StructureError(f"{len(free)} elements outside the base exceed the bound {bound}")
    for r in range(1, len(free) + 1):
        for D in combinations(free, r):
            if not hyperfree_in(B, A.union(D), A):
                return frozenset(D)
    return None


# ---------------------------------------------------------------------------
# HF-order verification


@dataclass(frozen=True)
class HFCheck:
    ok: bool
    piece: int | None = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _structural(B: Structure, A: frozenset[str], hf: HFOrder) -> HFCheck:
    order = hf.order
    if len(set(order)) != len(order):
        return HFCheck(False, None, "order repeats an element")
    if set(order) != B.element_set - A:
        return HFCheck(False, None, "order does not cover the complement of the base")
    sizes = piece_sizes(B.kind)
    for i, p in enumerate(hf.pieces):
        if len(p) not in sizes:
            return HFCheck(False, i, f"piece {list(p)} has size {len(p)} not in {sorted(sizes)}")
    return HFCheck(True)


def _strong_over(B: Structure, base: frozenset[str], piece: Sequence[str]) -> bool:
    return not peel(B, base, within=base.union(piece)).remaining


def _minimal(B: Structure, base: frozenset[str], piece: Sequence[str]) -> bool:
    for r in range(1, len(piece)):
        for Q in combinations(piece, r):
            mid = base.union(Q)
            if _strong_over(B, base, Q) and _strong_over(B, mid, [x for x in piece if x not in Q]):
                return False
    return True


def piece_neighbourhood(B: Structure, piece: Iterable[str]) -> frozenset[str]:
    out: set[str] = set()
    for x in piece:
        out |= B.adj(x)
    return frozenset(out - set(piece))


def verify_hf_order(B: Structure, A: Iterable[str], hf: HFOrder, mode: str = "fast",
                    bound: int = 14) -> HFCheck:
    """Check that every piece is a minimal strong extension of the base plus predecessors.

    ``fast`` tests only the full predecessor set.  ``exhaustive`` tests every
    subset of predecessors; subsets are cut down to the Gaifman neighbourhood of
    the piece, which does not change any hyperfree count, and that
    neighbourhood must have at most ``bound`` elements.
    """
    if mode not in ("fast", "exhaustive"):
        raise StructureError(f"unknown verification mode {mode!r}")
    A = B.subset(A)
    check = _structural(B, A, hf)
    if not check:
        return check
    pre: set[str] = set()
    for i, piece in enumerate(hf.pieces):
        if mode == "fast":
            bases = [frozenset(A | pre)]
        else:
            near = sorted(piece_neighbourhood(B, piece) & pre)
            if len(near) > bound:
                raise StructureError(f"piece {list(piece)} has {len(near)} earlier neighbours, bound is {bound}")
            bases = [frozenset(A.union(C0)) for r in range(len(near) + 1) for C0 in combinations(near, r)]
        for base in bases:
            if not _strong_over(B, base, piece):
                return HFCheck(False, i, f"piece {list(piece)} is not strong over {len(base)} earlier elements")
        if len(piece) > 1 and not _minimal(B, frozenset(A | pre), piece):
            return HFCheck(False, i, f"piece {list(piece)} is not a minimal extension")
        pre.update(piece)
    return HFCheck(True)


# ---------------------------------------------------------------------------
# closures


def _leq_type(M: Structure, b: str, A: AbstractSet[str]) -> frozenset:
    ty = set()
    if b in A:
        ty.add(("=", b))
    for name, args in M.tuples_with(b):
        if M.kind.symbols[name].kind != LOCAL_EQ:
            continue
        head, tail = args[:2], args[2:]
        if b not in head or not all(c in A for c in tail):
            continue
        other = head[1] if head[0] == b else head[0]
        if other in A:
            ty.add((name, other, tail))
    return frozenset(ty)


def gaifman_closure(M: Structure, A: Iterable[str]) -> frozenset[str]:
    """Incidence neighbours of ``A`` plus one lexicographically least element per parallelism type."""
    A = M.subset(A)
    inc = set(A)
    for a in A:
        inc |= M.inc(a)
    cands = set(A)
    for a in A:
        cands |= set(M.leq_partners(a))
        for name, args in M.tuples_with(a):
            if M.kind.symbols[name].kind == LOCAL_EQ:
                cands.update(args)
    reps: dict[frozenset, str] = {}
    for b in sorted(cands):
        reps.setdefault(_leq_type(M, b, A), b)
    return frozenset(inc | set(reps.values()))


def hf_closure(M: Structure, hf: HFOrder, C: Iterable[str], base: Iterable[str] = ()) -> frozenset[str]:
    """Close ``C`` downwards along ``hf``: each member pulls in its Gaifman closure among its predecessors."""
    base = M.subset(base)
    idx = hf.piece_index()
    C = set(C)
    missing = sorted(C - set(idx))
    if missing:
        raise StructureError(f"{missing[0]!r} is not in the order")
    pos = {x: i for i, x in enumerate(hf.order)}

    def hat(S: Iterable[str]) -> set[str]:
        out: set[str] = set()
        for x in S:
            out.update(hf.pieces[idx[x]])
        return out

    order = hf.order
    cl = hat(C)
    while True:
        grown = set(cl)
        for c in cl:
            down = base | set(order[: pos[c] + 1])
            sub = induced_substructure(M, down)
            grown |= gaifman_closure(sub, [c]) - base
        grown = hat(grown)
        if grown == cl:
            return frozenset(cl)
        cl = grown


def minimal_closed_sets(M: Structure, A: Iterable[str], bound: int = 16) -> list[frozenset[str]]:
    """All minimal nonempty ``D`` with no hyperfree tuple in ``A u D``."""
    A = M.subset(A)
    W = sorted(peel(M, A).remaining)
    if len(W) > bound:
        raise StructureError(f"closed core has {len(W)} elements, bound is {bound}")
    found: list[frozenset[str]] = []
    for r in range(1, len(W) + 1):
        for D in combinations(W, r):
            Ds = frozenset(D)
            if any(f <= Ds for f in found):
                continue
            if not hyperfree_in(M, A | Ds, A):
                found.append(Ds)
    return found


@dataclass(frozen=True)
class IclResult:
    one_shot: frozenset[str]
    fixed_point: frozenset[str]


def intrinsic_closure_report(M: Structure, A: Iterable[str], bound: int = 16) -> IclResult:
    A = M.subset(A)
    first = A.union(*minimal_closed_sets(M, A, bound))
    cur = first
    while True:
        nxt = cur.union(*minimal_closed_sets(M, cur, bound))
        if nxt == cur:
            return IclResult(first, cur)
        cur = nxt


def intrinsic_closure(M: Structure, A: Iterable[str], bound: int = 16, iterate: bool = True) -> frozenset[str]:
    """``A`` together with every minimal closed extension of it inside ``M``."""
    rep = intrinsic_closure_report(M, A, bound)
    return rep.fixed_point if iterate else rep.one_shot
