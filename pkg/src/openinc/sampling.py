"""Random structures of each kind, grown one element (or arc) at a time."""

from __future__ import annotations

import random
from collections import deque
from itertools import combinations

from .kinds import _single_variant, is_valid
from .structure import Kind, Structure

DEFAULT_KINDS = (
    Kind("projective"),
    Kind("ngon", n=4),
    Kind("steiner", k=2, n=3),
    Kind("net", k=3),
    Kind("affine"),
    Kind("moebius"),
    Kind("graph", n=2),
)


def _dist_from(M: Structure, s: str) -> dict[str, int]:
    dist = {s: 0}
    q = deque([s])
    while q:
        u = q.popleft()
        for v in M.inc(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return dist


def _max_degree(kind: Kind, sort: str, open_only: bool) -> int:
    if kind.name == "graph":
        return kind.n + (0 if open_only else 2)
    if kind.name == "steiner":
        base = 1 if sort == "point" else kind.k
        return base if open_only else kind.n
    if kind.is_ngon:
        return 1 if open_only else 3
    if kind.name == "net":
        base = 2 if sort == "point" else 1
        return base if open_only else kind.k
    if kind.name == "affine":
        base = 2
        return base if open_only else 4
    if kind.name == "moebius":
        base = 2 if sort == "point" else 3
        return base if open_only else 4
    return 3


def _new_element(M: Structure, rng: random.Random, name: str, open_only: bool) -> Structure | None:
    kind = M.kind
    sort = rng.choice(kind.sorts)
    other = kind.sorts[0] if len(kind.sorts) == 1 else kind.sorts[1 - kind.sorts.index(sort)]
    pool = list(M.of_sort(other))
    deg = rng.randint(0, min(len(pool), _max_degree(kind, sort, open_only)))
    nbrs = rng.sample(pool, deg)
    tuples = [(kind.incidence_symbol, (name, y)) for y in nbrs]
    if kind.name == "net" and sort == "line":
        tuples.append((f"P{rng.randrange(kind.k)}", (name,)))
    if kind.name == "affine" and sort == "line" and M.blocks and rng.random() < 0.4:
        rep = rng.choice(M.blocks)
        tuples += [("par", (name, l)) for l in set(M.leq_partners(rep)) | {rep}]
    if kind.name == "moebius" and sort == "block" and nbrs and rng.random() < 0.5:
        p = rng.choice(nbrs)
        through = sorted(M.inc(p))
        if through:
            b = rng.choice(through)
            cls = {c for c, tails in M.leq_partners(b).items() if (p,) in tails} | {b}
            tuples += [("tan", (name, c, p)) for c in cls]
    X = M.extend({name: sort}, tuples)
    if not is_valid(X):
        return None
    if open_only and _single_variant(X, name, X.element_set) is None:
        return None
    return X


def _new_arc(M: Structure, rng: random.Random, names: list[str]) -> Structure | None:
    n = M.kind.n
    elems = list(M.elements)
    if len(elems) < 2:
        return None
    a, b = rng.sample(elems, 2)
    d = _dist_from(M, a).get(b)
    same = M.sort_of(a) == M.sort_of(b)
    if same != (n % 2 == 1):
        return None
    if d is not None and d < n + 1:
        return None
    pt, bl = M.kind.sorts
    flip = {pt: bl, bl: pt}
    sorts, s = {}, M.sort_of(a)
    for x in names:
        s = flip[s]
        sorts[x] = s
    chain = [a] + names + [b]
    X = M.extend(sorts, [("inc", (u, v)) for u, v in zip(chain, chain[1:])])
    return X if is_valid(X) else None


def random_structure(kind: Kind, size: int, rng: random.Random, open_only: bool = True,
                     prefix: str = "x", attempts: int = 6) -> tuple[Structure, list[tuple[str, ...]]]:
    """A valid structure of at most ``size`` elements and the order it was built in.

    With ``open_only`` every step adds a hyperfree element or clean arc, so the
    build order is an HF-order and the result is open.
    """
    M = Structure(kind, {})
    steps: list[tuple[str, ...]] = []
    i = 0
    while len(M) < size:
        X = None
        if kind.is_ngon and kind.n > 3 and len(M) + kind.n - 2 <= size and rng.random() < 0.35:
            names = [f"{prefix}{i + j}" for j in range(kind.n - 2)]
            X = _new_arc(M, rng, names)
            if X is not None:
                steps.append(tuple(names))
                i += len(names)
                M = X
                continue
        name = f"{prefix}{i}"
        for _ in range(attempts):
            X = _new_element(M, rng, name, open_only)
            if X is not None:
                break
        if X is None:
            X = M.extend({name: rng.choice(kind.sorts)})
        steps.append((name,))
        M = X
        i += 1
    return M, steps


def random_subset(M: Structure, rng: random.Random, p: float = 0.4) -> frozenset[str]:
    return frozenset(x for x in M.elements if rng.random() < p)


def densify(M: Structure, rng: random.Random, tries: int = 30) -> Structure:
    """Add random incidences between existing elements while the structure stays valid."""
    kind = M.kind
    elems = list(M.elements)
    for _ in range(tries):
        if len(elems) < 2:
            break
        x, y = rng.sample(elems, 2)
        if len(kind.sorts) == 2 and M.sort_of(x) == M.sort_of(y):
            continue
        if y in M.inc(x):
            continue
        X = Structure(kind, M.sorts, list(M.tuples) + [(kind.incidence_symbol, (x, y))])
        if is_valid(X):
            M = X
    return M


def corpus_structure(kind: Kind, rng: random.Random, max_size: int = 10) -> Structure:
    """Mixed corpus: open builds, unconstrained builds and densified builds."""
    size = rng.randint(1, max_size)
    mode = rng.random()
    M, _ = random_structure(kind, size, rng, open_only=mode < 0.3)
    if mode >= 0.6:
        M = densify(M, rng)
    return M


def _hf_degree(kind: Kind, sort: str) -> int:
    """Largest incidence count a single hyperfree element of this sort can have."""
    if kind.name == "graph":
        return kind.n
    if kind.name == "steiner":
        return 1 if sort == "point" else kind.k
    if kind.name in ("net", "affine"):
        return 2 if sort == "point" or kind.name == "affine" else 1
    if kind.name == "moebius":
        return 2 if sort == "point" else 3
    return 2 if kind.n == 3 else 1


def _extras(A: Structure, name: str, sort: str, nbrs: tuple[str, ...]) -> list[list]:
    kind = A.kind
    if kind.name == "net" and sort == "line":
        return [[(f"P{i}", (name,))] for i in range(kind.k)]
    if kind.name == "affine" and sort == "line":
        out, seen = [[]], set()
        for l in A.blocks:
            cls = frozenset(A.leq_partners(l)) | {l}
            if cls not in seen:
                seen.add(cls)
                out.append([("par", (name, m)) for m in sorted(cls)])
        return out
    if kind.name == "moebius" and sort == "block":
        out, seen = [[]], set()
        for p in nbrs:
            for b in sorted(A.inc(p)):
                cls = frozenset(c for c, tails in A.leq_partners(b).items() if (p,) in tails) | {b}
                if (p, cls) not in seen:
                    seen.add((p, cls))
                    out.append([("tan", (name, c, p)) for c in sorted(cls)])
        return out
    return [[]]


def one_step_candidates(A: Structure, prefix: str = "new") -> list[Structure]:
    """Every valid extension of ``A`` by one strong candidate tuple (element or arc)."""
    from .openness import is_strong

    kind = A.kind
    out = []
    name = prefix
    for sort in kind.sorts:
        other = kind.sorts[0] if len(kind.sorts) == 1 else kind.sorts[1 - kind.sorts.index(sort)]
        pool = A.of_sort(other)
        for r in range(min(len(pool), _hf_degree(kind, sort)) + 1):
            for S in combinations(pool, r):
                base = [(kind.incidence_symbol, (name, y)) for y in S]
                for extra in _extras(A, name, sort, S):
                    X = A.extend({name: sort}, base + extra)
                    if is_valid(X) and is_strong(X, A.element_set):
                        out.append(X)
    if kind.is_ngon and kind.n >= 4:
        L = kind.n - 2
        pt, bl = kind.sorts
        flip = {pt: bl, bl: pt}
        for a, b in combinations(A.elements, 2):
            for u, v in ((a, b), (b, a)):
                sorts, s = {}, A.sort_of(u)
                names = [f"{prefix}{j}" for j in range(L)]
                for x in names:
                    s = flip[s]
                    sorts[x] = s
                if flip[s] != A.sort_of(v):
                    continue
                chain = [u] + names + [v]
                X = A.extend(sorts, [("inc", (p, q)) for p, q in zip(chain, chain[1:])])
                if is_valid(X) and is_strong(X, A.element_set):
                    out.append(X)
                break
    return out
