"""Naive reference implementations written from the definitions.

Everything except ``saturation_degree`` reads only ``Structure.tuples`` and
sorts; the saturation oracle reuses the library amalgam and validator but none
of the degree rules it is checked against."""

from __future__ import annotations

from collections import deque
from itertools import combinations

import math


def _incidences(M):
    inc = M.kind.incidence_symbol
    return [(a, b) for name, (a, b) in ((n, t) for n, t in M.tuples if n == inc) if a != b]


def _nbrs(M, present):
    out = {x: set() for x in present}
    for a, b in _incidences(M):
        if a in present and b in present:
            out[a].add(b)
            out[b].add(a)
    return out


def _tangencies(M, present):
    """Map block -> set of points where a present block touches it."""
    out = {}
    for name, args in M.tuples:
        if name != "tan":
            continue
        b, c, p = args
        if b in present and c in present and p in present:
            out.setdefault(b, set()).add(p)
            out.setdefault(c, set()).add(p)
    return out


def _parallel(M, present):
    out = {}
    for name, args in M.tuples:
        if name == "par" and all(a in present for a in args):
            out.setdefault(args[0], set()).add(args[1])
            out.setdefault(args[1], set()).add(args[0])
    return out


def hyperfree_singles(M, present, free):
    kind = M.kind
    nb = _nbrs(M, present)
    pt = kind.sorts[0]
    tan = _tangencies(M, present) if kind.name == "moebius" else {}
    par = _parallel(M, present) if kind.name == "affine" else {}
    out = set()
    for x in free:
        d = len(nb[x])
        point = M.sorts[x] == pt
        if kind.name == "graph":
            ok = d <= kind.n
        elif kind.name == "steiner":
            ok = d <= (1 if point else kind.k)
        elif kind.name == "net":
            ok = d <= (2 if point else 1)
        elif kind.name == "affine":
            ok = d <= 2 if point else (d <= 1 or (d == 2 and not par.get(x)))
        elif kind.name == "moebius":
            ok = d <= 2 if point else d + len(tan.get(x, ())) <= 3
        else:
            ok = d <= 1 or (kind.n == 3 and d == 2)
        if ok:
            out.add(x)
    return out


def hyperfree_arcs(M, present, free):
    """All chains of n-2 free elements, each with exactly two present neighbours."""
    L = M.kind.n - 2
    nb = _nbrs(M, present)
    good = {x for x in free if len(nb[x]) == 2}
    arcs = set()

    def extend(path):
        if len(path) == L:
            arcs.add(min(path, path[::-1]))
            return
        for y in nb[path[-1]]:
            if y in good and y not in path:
                extend(path + (y,))

    for s in good:
        extend((s,))
    return arcs


def has_hyperfree(M, present, base):
    free = set(present) - set(base)
    if hyperfree_singles(M, present, free):
        return True
    return M.kind.is_ngon and M.kind.n >= 4 and bool(hyperfree_arcs(M, present, free))


def closed_subsets(M, A):
    """Every nonempty D outside A with no hyperfree tuple in A u D."""
    A = set(A)
    rest = sorted(set(M.sorts) - A)
    for r in range(1, len(rest) + 1):
        for D in combinations(rest, r):
            if not has_hyperfree(M, A | set(D), A):
                yield frozenset(D)


def naive_is_open(M, A=()):
    return next(closed_subsets(M, A), None) is None


def naive_minimal_closed(M, A):
    all_closed = list(closed_subsets(M, A))
    return [D for D in all_closed if not any(E < D for E in all_closed)]


def naive_icl_once(M, A):
    out = set(A)
    for D in naive_minimal_closed(M, A):
        out |= D
    return frozenset(out)


def naive_icl(M, A):
    cur = frozenset(A)
    while True:
        nxt = naive_icl_once(M, cur)
        if nxt == cur:
            return cur
        cur = nxt


def naive_girth(M):
    """Shortest cycle length in the incidence graph via BFS from every vertex."""
    nb = _nbrs(M, set(M.sorts))
    best = math.inf
    for s in nb:
        dist, parent = {s: 0}, {s: None}
        q = deque([s])
        while q:
            u = q.popleft()
            for v in nb[u]:
                if v not in dist:
                    dist[v], parent[v] = dist[u] + 1, u
                    q.append(v)
                elif parent[u] != v:
                    best = min(best, dist[u] + dist[v] + 1)
    return best


def naive_distance(M, X, Y):
    nb = _nbrs(M, set(M.sorts))
    dist = {x: 0 for x in X}
    q = deque(X)
    while q:
        u = q.popleft()
        if u in Y:
            return dist[u]
        for v in nb[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                q.append(v)
    return math.inf


def naive_delta(M, weights):
    p, b, i = weights
    pts = sum(1 for s in M.sorts.values() if s == M.kind.sorts[0])
    blocks = len(M.sorts) - pts if len(M.kind.sorts) == 2 else 0
    return p * pts + b * blocks + i * len(_incidences(M))


def saturation_degree(B, A, cap=6):
    """Largest m such that m copies of B over A amalgamate freely into a valid
    structure; None if every m up to ``cap`` works."""
    from openinc import free_amalgam, is_valid

    A = frozenset(A)
    ext = [x for x in B.elements if x not in A]
    M = B
    for m in range(2, cap + 1):
        copy = B.rename({x: f"{x}~{m}" for x in ext})
        M = free_amalgam(M, copy, A)
        if not is_valid(M):
            return m - 1
    return None
