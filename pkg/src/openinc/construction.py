"""Free amalgams, staged free completions, canonical amalgams and k-iterates."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Iterator, Sequence

from .kinds import ExtensionClass, classify_one_step, validate_T_forall
from .openness import intrinsic_closure, is_strong
from .structure import LOCAL_EQ, Structure, StructureError, induced_substructure


class AmalgamError(StructureError):
    pass


# ---------------------------------------------------------------------------
# free amalgam


def _base_of(B: Structure, C: Structure) -> frozenset[str]:
    return B.element_set & C.element_set


def free_amalgam(B: Structure, C: Structure, A: Iterable[str] | None = None) -> Structure:
    """Union of ``B`` and ``C`` over their common part, local equivalences closed through it.

    The result is not validated.
    """
    if B.kind != C.kind:
        raise AmalgamError("structures of different kinds")
    shared = _base_of(B, C)
    if A is not None:
        A = frozenset(A)
        if A != shared:
            extra = sorted(shared - A) or sorted(A - shared)
            raise AmalgamError(f"id collision outside the base: {extra[0]!r}")
    A = shared
    for a in sorted(A):
        if B.sort_of(a) != C.sort_of(a):
            raise AmalgamError(f"base element {a!r} has different sorts")
    if induced_substructure(B, A).tuples != induced_substructure(C, A).tuples:
        raise AmalgamError("the base is embedded differently in the two sides")
    sorts = B.sorts
    sorts.update(C.sorts)
    tuples = set(B.tuples) | set(C.tuples)
    # b ~ a in B and a ~ c in C with a and the parameters in the base
    for name, args in B.tuples:
        if B.kind.symbols[name].kind != LOCAL_EQ:
            continue
        tail = args[2:]
        if not all(t in A for t in tail):
            continue
        for b, a in ((args[0], args[1]), (args[1], args[0])):
            if b in A or a not in A:
                continue
            for c, tails in C.leq_partners(a).items():
                if c not in A and tail in tails:
                    tuples.add((name, (b, c) + tail))
    return Structure(B.kind, sorts, tuples)


# ---------------------------------------------------------------------------
# free completion


@dataclass(frozen=True)
class Provenance:
    stage: int
    rule: str
    parents: tuple[str, ...]


@dataclass
class CompletionStage:
    structure: Structure
    stage: int
    provenance: dict[str, Provenance] = field(default_factory=dict)
    truncated: bool = False
    added: list[int] = field(default_factory=list)

    def stage_structure(self, s: int) -> Structure:
        """The prefix after ``s`` stages (``s`` = 0 is the seed)."""
        keep = [x for x in self.structure.elements if x not in self.provenance or self.provenance[x].stage <= s]
        return induced_substructure(self.structure, keep)


def substeps(kind, projective_stage: bool = True) -> tuple[str, ...]:
    name = kind.name
    if name == "steiner":
        return ("blocks", "pad")
    if name == "net":
        return ("meets", "classes")
    if name == "affine":
        return ("joins", "meets", "parallels")
    if name == "moebius":
        return ("blocks", "touch", "second", "disjoint") if projective_stage else ("blocks", "touch", "second")
    if kind.is_ngon:
        return ("arcs",)
    return ("neighbours",)


# each generator yields (rule, parents, new elements as (sort, ...), tuple builder)
# where the builder maps the list of new ids to relation tuples


def _distances(X: Structure) -> dict[str, dict[str, int]]:
    out = {}
    for s in X.elements:
        dist = {s: 0}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in X.inc(u):
                if v not in dist:
                    dist[v] = dist[u] + 1
                    q.append(v)
        out[s] = dist
    return out


def _rules(X: Structure, sub: str, multiplicity: int) -> Iterator[tuple]:
    kind = X.kind
    P, L = X.points, X.blocks
    pt, bl = kind.point_sort, kind.block_sort
    if sub == "neighbours":
        for S in combinations(X.elements, kind.n):
            yield ("neighbours", S, ["vertex"] * multiplicity,
                   lambda new, S=S: [("edge", (v, s)) for v in new for s in S])
    elif kind.name == "steiner":
        if sub == "blocks":
            for S in combinations(P, kind.k):
                common = frozenset.intersection(*(X.inc(p) for p in S))
                if not common:
                    yield ("block", S, [bl], lambda new, S=S: [("inc", (p, new[0])) for p in S])
        else:
            for b in L:
                gap = kind.n - len(X.inc(b))
                if gap > 0:
                    yield ("pad", (b,), [pt] * gap, lambda new, b=b: [("inc", (p, b)) for p in new])
    elif kind.is_ngon:
        n = kind.n
        dist = _distances(X)
        for a, b in combinations(X.elements, 2):
            d = dist[a].get(b)
            same = X.sort_of(a) == X.sort_of(b)
            if d == n + 1 or (d is None and same == (n % 2 == 1)):
                other = {pt: bl, bl: pt}
                sorts, s = [], X.sort_of(a)
                for _ in range(n - 2):
                    s = other[s]
                    sorts.append(s)
                yield ("arc", (a, b), sorts,
                       lambda new, a=a, b=b: [("inc", (x, y)) for x, y in zip((a,) + tuple(new), tuple(new) + (b,))])
    elif kind.name == "net":
        if sub == "meets":
            for l, m in combinations(L, 2):
                if X.labels(l) != X.labels(m) and not (X.inc(l) & X.inc(m)):
                    yield ("meet", (l, m), [pt], lambda new, l=l, m=m: [("inc", (new[0], l)), ("inc", (new[0], m))])
        else:
            for p in P:
                have = set()
                for l in X.inc(p):
                    have |= X.labels(l)
                for i in range(kind.k):
                    c = f"P{i}"
                    if c not in have:
                        yield ("class", (p,), [bl], lambda new, p=p, c=c: [("inc", (p, new[0])), (c, (new[0],))])
    elif kind.name == "affine":
        if sub == "joins":
            for p, q in combinations(P, 2):
                if not (X.inc(p) & X.inc(q)):
                    yield ("join", (p, q), [bl], lambda new, p=p, q=q: [("inc", (p, new[0])), ("inc", (q, new[0]))])
        elif sub == "meets":
            for l, m in combinations(L, 2):
                if m not in X.leq_partners(l) and not (X.inc(l) & X.inc(m)):
                    yield ("meet", (l, m), [pt], lambda new, l=l, m=m: [("inc", (new[0], l)), ("inc", (new[0], m))])
        else:
            classes = sorted({tuple(sorted(set(X.leq_partners(l)) | {l})) for l in L})
            for cls in classes:
                for p in P:
                    if any(p in X.inc(l) for l in cls):
                        continue
                    yield ("parallel", (cls[0], p), [bl],
                           lambda new, cls=cls, p=p: [("inc", (p, new[0]))] + [("par", (new[0], l)) for l in cls])
    elif kind.name == "moebius":
        if sub == "blocks":
            for S in combinations(P, 3):
                if not frozenset.intersection(*(X.inc(p) for p in S)):
                    yield ("block", S, [bl], lambda new, S=S: [("inc", (p, new[0])) for p in S])
        elif sub == "touch":
            for b in L:
                for p in sorted(X.inc(b)):
                    cls = sorted({c for c, tails in X.leq_partners(b).items() if (p,) in tails} | {b})
                    if cls[0] != b:
                        continue
                    for q in P:
                        if any(q in X.inc(c) for c in cls):
                            continue
                        yield ("touch", (b, p, q), [bl],
                               lambda new, cls=cls, p=p, q=q: [("inc", (p, new[0])), ("inc", (q, new[0]))]
                               + [("tan", (new[0], c, p)) for c in cls])
        elif sub == "second":
            for b, c in combinations(L, 2):
                common = X.inc(b) & X.inc(c)
                if len(common) == 1:
                    (p,) = common
                    if (p,) not in X.leq_partners(b).get(c, ()):
                        yield ("second", (b, c), [pt], lambda new, b=b, c=c: [("inc", (new[0], b)), ("inc", (new[0], c))])
        else:
            for b, c in combinations(L, 2):
                if not (X.inc(b) & X.inc(c)):
                    yield ("disjoint", (b, c), [pt, pt],
                           lambda new, b=b, c=c: [("inc", (x, y)) for x in new for y in (b, c)])


def _fresh(taken: set[str], stage: int, j: int) -> str:
    name = f"f{stage}.{j}"
    while name in taken:
        name += "'"
    return name


def completion_step(X: Structure, stage: int, provenance: dict[str, Provenance], cap: int,
                    sub: str | None = None, multiplicity: int | None = None) -> tuple[Structure, bool]:
    """Apply one sub-step of the completion; returns the new prefix and a truncation flag."""
    kind = X.kind
    if sub is None:
        sub = substeps(kind)[0]
    mult = kind.m if multiplicity is None else multiplicity
    sorts = X.sorts
    taken = set(sorts)
    tuples = list(X.tuples)
    j = 0
    truncated = False
    for rule, parents, new_sorts, build in _rules(X, sub, mult):
        if len(sorts) + len(new_sorts) > cap:
            truncated = True
            break
        new = []
        for s in new_sorts:
            j += 1
            x = _fresh(taken, stage, j)
            taken.add(x)
            sorts[x] = s
            new.append(x)
            provenance[x] = Provenance(stage, rule, tuple(parents))
        tuples.extend(build(new))
    out = Structure(kind, sorts, tuples)
    if (kind.name, sub) in (("affine", "parallels"), ("moebius", "touch")):
        out = _close_local_eq(out)
    return out, truncated


def _close_local_eq(M: Structure) -> Structure:
    """Transitively close every local-equivalence symbol for each parameter tail."""
    groups: dict[tuple, dict[str, str]] = {}

    def find(par: dict[str, str], x: str) -> str:
        while par.setdefault(x, x) != x:
            par[x] = par[par[x]]
            x = par[x]
        return x

    plain = []
    for name, args in M.tuples:
        if M.kind.symbols[name].kind != LOCAL_EQ:
            plain.append((name, args))
            continue
        par = groups.setdefault((name, args[2:]), {})
        ra, rb = find(par, args[0]), find(par, args[1])
        if ra != rb:
            par[max(ra, rb)] = min(ra, rb)
    closed = []
    for (name, tail), par in groups.items():
        members: dict[str, list[str]] = {}
        for x in list(par):
            members.setdefault(find(par, x), []).append(x)
        for cls in members.values():
            for a, b in combinations(sorted(cls), 2):
                closed.append((name, (a, b) + tail))
    return Structure(M.kind, M.sorts, plain + closed)


def free_completion(A: Structure, stages: int, cap: int, multiplicity: int | None = None,
                    projective_stage: bool = True) -> CompletionStage:
    """The first ``stages`` sub-steps of the free completion of ``A``."""
    if cap < len(A):
        raise StructureError(f"cap {cap} is smaller than the seed ({len(A)} elements)")
    if stages < 0:
        raise StructureError("stages must be non-negative")
    subs = substeps(A.kind, projective_stage)
    prov: dict[str, Provenance] = {}
    cur = A
    added = []
    truncated = False
    for s in range(1, stages + 1):
        before = len(cur)
        cur, truncated = completion_step(cur, s, prov, cap, subs[(s - 1) % len(subs)], multiplicity)
        added.append(len(cur) - before)
        if truncated:
            return CompletionStage(cur, s, prov, True, added)
    return CompletionStage(cur, stages, prov, truncated, added)


def completion_fixed_point(A: Structure, max_stages: int, cap: int, projective_stage: bool = True) -> Structure | None:
    """The finite completion if a full cycle of sub-steps adds nothing, else None."""
    cycle = len(substeps(A.kind, projective_stage))
    run = free_completion(A, max_stages, cap, projective_stage=projective_stage)
    if run.truncated:
        return None
    added = run.added
    for i in range(0, len(added) - cycle + 1):
        if not any(added[i:i + cycle]):
            return run.stage_structure(i)
    return None


# ---------------------------------------------------------------------------
# canonical amalgam


def _candidate_tuples(X: Structure, A: frozenset[str]) -> Iterator[tuple[str, ...]]:
    free = [x for x in X.elements if x not in A]
    for x in free:
        yield (x,)
    if X.kind.is_ngon and X.kind.n >= 4:
        L = X.kind.n - 2
        seen = set()
        for s in free:
            stack = [(s,)]
            while stack:
                path = stack.pop()
                if len(path) == L:
                    key = min(path, path[::-1])
                    if key not in seen:
                        seen.add(key)
                        yield key
                    continue
                for y in sorted(X.inc(path[-1])):
                    if y not in A and y not in path:
                        stack.append(path + (y,))


def algebraic_extensions_in(X: Structure, A: Iterable[str]) -> list[tuple[tuple[str, ...], ExtensionClass]]:
    """One-step algebraic strong extensions of ``A`` realised inside ``X``."""
    A = X.subset(A)
    out = []
    for t in _candidate_tuples(X, A):
        cls = classify_one_step(induced_substructure(X, A.union(t)), A)
        if cls.tag == "algebraic":
            out.append((t, cls))
    return out


def canonical_amalgam(B: Structure, C: Structure, stages: int, cap: int,
                      multiplicity: int | None = None) -> CompletionStage:
    """Free completion of the free amalgam, after checking its preconditions."""
    A = _base_of(B, C)
    for side, X in (("B", B), ("C", C)):
        if not is_strong(X, A):
            raise AmalgamError(f"base is not strong in {side}")
        alg = algebraic_extensions_in(X, A)
        if alg:
            t, cls = alg[0]
            raise AmalgamError(f"A not algebraically closed in {side}: {list(t)} is algebraic of degree {cls.degree}")
    M = free_amalgam(B, C)
    bad = validate_T_forall(M)
    if bad:
        raise AmalgamError(f"free amalgam is invalid: {bad[0]}")
    return free_completion(M, stages, cap, multiplicity)


# ---------------------------------------------------------------------------
# k-iterates


def k_iterate(C: Structure, k: int, order: Sequence[str]) -> Structure:
    """``k`` copies of ``C`` glued end to end, last element of copy i = first of copy i+1."""
    if k < 1:
        raise StructureError("k must be positive")
    order = list(order)
    if sorted(order) != list(C.elements):
        raise StructureError("order must enumerate the structure")
    first, last = order[0], order[-1]
    if C.sort_of(first) != C.sort_of(last):
        raise StructureError(f"first and last elements have different sorts ({first}, {last})")
    pos = {x: j for j, x in enumerate(order)}
    n = len(order) - 1

    def name(i: int, j: int) -> str:
        if j == n and i < k - 1:
            return f"d{i + 1}_0"
        return f"d{i}_{j}"

    sorts: dict[str, str] = {}
    tuples = []
    for i in range(k):
        f = {x: name(i, pos[x]) for x in order}
        for x in order:
            sorts[f[x]] = C.sort_of(x)
        for sym, args in C.tuples:
            tuples.append((sym, tuple(f[a] for a in args)))
    return _close_local_eq(Structure(C.kind, sorts, tuples))


# ---------------------------------------------------------------------------
# independence


@dataclass
class IndependenceReport:
    applicable: bool
    independent: bool
    icl_a: frozenset[str]
    icl_ab: frozenset[str]
    icl_ac: frozenset[str]
    icl_abc: frozenset[str]
    reason: str = ""


def independent_icl(M: Structure, A: Iterable[str], B: Iterable[str], C: Iterable[str],
                    bound: int = 16) -> IndependenceReport:
    """Finite check of ``icl(ABC) = icl(AB) (x)_{icl(A)} icl(AC)``."""
    A, B, C = M.subset(A), M.subset(B), M.subset(C)
    ia = intrinsic_closure(M, A, bound)
    iab = intrinsic_closure(M, A | B, bound)
    iac = intrinsic_closure(M, A | C, bound)
    iabc = intrinsic_closure(M, A | B | C, bound)
    for label, S in (("icl(AB)", iab), ("icl(AC)", iac)):
        alg = algebraic_extensions_in(induced_substructure(M, S), ia)
        if alg:
            t, _ = alg[0]
            return IndependenceReport(False, False, ia, iab, iac, iabc,
                                      f"criterion inapplicable: {list(t)} is algebraic over icl(A) inside {label}")
    if iab & iac != ia:
        return IndependenceReport(True, False, ia, iab, iac, iabc, "icl(AB) and icl(AC) overlap outside icl(A)")
    if iabc != iab | iac:
        return IndependenceReport(True, False, ia, iab, iac, iabc, "icl(ABC) exceeds icl(AB) u icl(AC)")
    amalgam = free_amalgam(induced_substructure(M, iab), induced_substructure(M, iac))
    if amalgam != induced_substructure(M, iabc):
        return IndependenceReport(True, False, ia, iab, iac, iabc, "extra relations between the two sides")
    return IndependenceReport(True, True, ia, iab, iac, iabc, "")
