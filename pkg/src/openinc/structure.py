"""Finite multi-sorted relational structures and the graph views built on them.

A :class:`Structure` is an immutable bag of sorted elements plus relation
tuples over a signature chosen by its :class:`Kind`.  Everything else in the
package is written as pure functions over these objects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Iterator, Mapping

import networkx as nx

INCIDENCE = "incidence"
LOCAL_EQ = "local-equivalence"

KIND_NAMES = ("projective", "ngon", "steiner", "net", "affine", "moebius", "graph")


class StructureError(ValueError):
    """Raised for malformed structures, unknown ids or bad subsets."""


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: str
    profile: tuple[str, ...]

    def __post_init__(self) -> None:
        if self.arity != len(self.profile):
            raise StructureError(f"symbol {self.name}: arity does not match profile")
        if self.kind == LOCAL_EQ and (self.arity < 2 or self.profile[0] != self.profile[1]):
            raise StructureError(f"symbol {self.name}: bad local-equivalence profile")


@dataclass(frozen=True)
class Kind:
    """A geometry class with its parameters.

    ``m`` is only used by graph completions (copies per rule instance).
    """

    name: str
    k: int | None = None
    n: int | None = None
    m: int = 3

    def __post_init__(self) -> None:
        name, k, n = self.name, self.k, self.n
        if name not in KIND_NAMES:
            raise StructureError(f"unknown geometry class {name!r}")
        if name == "projective":
            if n not in (None, 3):
                raise StructureError("projective planes have n=3")
            object.__setattr__(self, "n", 3)
        elif name == "ngon":
            if n is None or n < 3:
                raise StructureError("ngon needs n >= 3")
        elif name == "steiner":
            if k is None or n is None or not 2 <= k < n:
                raise StructureError("steiner needs 2 <= k < n")
        elif name == "net":
            if k is None or k < 3:
                raise StructureError("net needs k >= 3")
        elif name == "graph":
            if n is None or n < 0:
                raise StructureError("graph needs n >= 0")
        if self.m < 1:
            raise StructureError("m must be positive")

    @property
    def is_ngon(self) -> bool:
        return self.name in ("ngon", "projective")

    @property
    def sorts(self) -> tuple[str, ...]:
        if self.name == "graph":
            return ("vertex",)
        if self.name in ("steiner", "moebius"):
            return ("point", "block")
        return ("point", "line")

    @property
    def point_sort(self) -> str:
        return self.sorts[0]

    @property
    def block_sort(self) -> str:
        return self.sorts[-1]

    @cached_property
    def symbols(self) -> dict[str, Symbol]:
        if self.name == "graph":
            syms = [Symbol("edge", 2, INCIDENCE, ("vertex", "vertex"))]
        else:
            p, b = self.sorts
            syms = [Symbol("inc", 2, INCIDENCE, (p, b))]
            if self.name == "net":
                syms += [Symbol(f"P{i}", 1, INCIDENCE, ("line",)) for i in range(self.k)]
            elif self.name == "affine":
                syms.append(Symbol("par", 2, LOCAL_EQ, ("line", "line")))
            elif self.name == "moebius":
                syms.append(Symbol("tan", 3, LOCAL_EQ, ("block", "block", "point")))
        return {s.name: s for s in syms}

    @property
    def incidence_symbol(self) -> str:
        return "edge" if self.name == "graph" else "inc"

    def header(self) -> str:
        parts = ["geometry", self.name]
        if self.name == "steiner":
            parts += [f"k={self.k}", f"n={self.n}"]
        elif self.name == "ngon":
            parts.append(f"n={self.n}")
        elif self.name == "net":
            parts.append(f"k={self.k}")
        elif self.name == "graph":
            parts.append(f"n={self.n}")
        if self.m != 3:
            parts.append(f"m={self.m}")
        return " ".join(parts)

    def as_dict(self) -> dict:
        return {"class": self.name, "k": self.k, "n": self.n, "m": self.m}


Tuple_ = tuple[str, tuple[str, ...]]


def _normalise(kind: Kind, sorts: Mapping[str, str], sym: str, args: Iterable[str]) -> Tuple_ | None:
    symbol = kind.symbols.get(sym)
    if symbol is None:
        raise StructureError(f"unknown relation symbol {sym!r} for {kind.name}")
    args = tuple(args)
    if len(args) != symbol.arity:
        raise StructureError(f"{sym} expects {symbol.arity} arguments, got {len(args)}")
    for a in args:
        if a not in sorts:
            raise StructureError(f"unknown element id {a!r}")
    if symbol.kind == INCIDENCE and symbol.arity == 2:
        s0, s1 = symbol.profile
        if s0 == s1:
            args = tuple(sorted(args))
        elif (sorts[args[0]], sorts[args[1]]) == (s1, s0):
            args = (args[1], args[0])
    elif symbol.kind == LOCAL_EQ:
        if args[0] == args[1]:
            for a, s in zip(args, symbol.profile):
                if sorts[a] != s:
                    raise StructureError(f"{sym} {' '.join(args)}: sort mismatch at {a!r}")
            return None
        args = tuple(sorted(args[:2])) + args[2:]
    for a, s in zip(args, symbol.profile):
        if sorts[a] != s:
            raise StructureError(f"{sym} {' '.join(args)}: sort mismatch at {a!r}")
    return (sym, args)


class Structure:
    """An immutable finite structure of a given kind.

    Binary incidence is stored in sort-profile order and queried symmetrically;
    local-equivalence tuples keep their first two arguments sorted and drop
    reflexive instances.
    """

    __slots__ = ("kind", "_sorts", "tuples", "__dict__")

    def __init__(self, kind: Kind, sorts: Mapping[str, str], tuples: Iterable[tuple[str, Iterable[str]]] = ()):
        for x, s in sorts.items():
            if s not in kind.sorts:
                raise StructureError(f"element {x!r} has sort {s!r} not in {kind.sorts}")
        self.kind = kind
        self._sorts: dict[str, str] = dict(sorted(sorts.items()))
        norm = set()
        for sym, args in tuples:
            t = _normalise(kind, self._sorts, sym, args)
            if t is not None:
                norm.add(t)
        self.tuples: frozenset[Tuple_] = frozenset(norm)

    # basic access

    @cached_property
    def elements(self) -> tuple[str, ...]:
        return tuple(self._sorts)

    @cached_property
    def element_set(self) -> frozenset[str]:
        return frozenset(self._sorts)

    def __len__(self) -> int:
        return len(self._sorts)

    def __contains__(self, x: object) -> bool:
        return x in self._sorts

    def __iter__(self) -> Iterator[str]:
        return iter(self._sorts)

    def sort_of(self, x: str) -> str:
        try:
            return self._sorts[x]
        except KeyError:
            raise StructureError(f"unknown element id {x!r}") from None

    @property
    def sorts(self) -> dict[str, str]:
        return dict(self._sorts)

    def of_sort(self, sort: str) -> tuple[str, ...]:
        return tuple(x for x, s in self._sorts.items() if s == sort)

    @cached_property
    def points(self) -> tuple[str, ...]:
        return self.of_sort(self.kind.point_sort)

    @cached_property
    def blocks(self) -> tuple[str, ...]:
        return self.of_sort(self.kind.block_sort)

    def sorted_tuples(self) -> list[Tuple_]:
        return sorted(self.tuples)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Structure):
            return NotImplemented
        return self.kind == other.kind and self._sorts == other._sorts and self.tuples == other.tuples

    def __hash__(self) -> int:
        return hash((self.kind, tuple(self._sorts.items()), self.tuples))

    def __repr__(self) -> str:
        return f"Structure({self.kind.name}, {len(self)} elements, {len(self.tuples)} tuples)"

    # indexes

    @cached_property
    def _inc(self) -> dict[str, frozenset[str]]:
        sym = self.kind.incidence_symbol
        nb: dict[str, set[str]] = {x: set() for x in self._sorts}
        for name, args in self.tuples:
            if name == sym:
                a, b = args
                if a != b:
                    nb[a].add(b)
                    nb[b].add(a)
        return {x: frozenset(v) for x, v in nb.items()}

    def inc(self, x: str) -> frozenset[str]:
        """Incidence neighbours of ``x`` (graph edges for the graph kind)."""
        return self._inc[x]

    @cached_property
    def incidence_count(self) -> int:
        return sum(len(v) for v in self._inc.values()) // 2

    @cached_property
    def _labels(self) -> dict[str, frozenset[str]]:
        lab: dict[str, set[str]] = {x: set() for x in self._sorts}
        for name, args in self.tuples:
            if len(args) == 1:
                lab[args[0]].add(name)
        return {x: frozenset(v) for x, v in lab.items()}

    def labels(self, x: str) -> frozenset[str]:
        return self._labels[x]

    @cached_property
    def _leq(self) -> dict[str, dict[str, set[tuple[str, ...]]]]:
        # element -> partner -> set of parameter tails
        out: dict[str, dict[str, set[tuple[str, ...]]]] = {x: {} for x in self._sorts}
        for name, args in self.tuples:
            if self.kind.symbols[name].kind != LOCAL_EQ:
                continue
            a, b, tail = args[0], args[1], args[2:]
            out[a].setdefault(b, set()).add(tail)
            out[b].setdefault(a, set()).add(tail)
        return out

    def leq_partners(self, x: str) -> dict[str, set[tuple[str, ...]]]:
        """Local-equivalence partners of ``x`` mapped to their parameter tails."""
        return self._leq[x]

    def has_leq(self, sym: str, a: str, b: str, tail: tuple[str, ...] = ()) -> bool:
        if a == b:
            return True
        return (sym, tuple(sorted((a, b))) + tuple(tail)) in self.tuples

    @cached_property
    def _by_element(self) -> dict[str, list[Tuple_]]:
        out: dict[str, list[Tuple_]] = {x: [] for x in self._sorts}
        for t in self.tuples:
            for a in set(t[1]):
                out[a].append(t)
        return out

    def tuples_with(self, x: str) -> list[Tuple_]:
        return self._by_element[x]

    @cached_property
    def _full_adj(self) -> dict[str, frozenset[str]]:
        nb: dict[str, set[str]] = {x: set() for x in self._sorts}
        for _, args in self.tuples:
            for a, b in combinations(set(args), 2):
                nb[a].add(b)
                nb[b].add(a)
        return {x: frozenset(v) for x, v in nb.items()}

    def adj(self, x: str) -> frozenset[str]:
        """Neighbours of ``x`` in the full Gaifman graph."""
        return self._full_adj[x]

    # construction helpers

    def subset(self, ids: Iterable[str]) -> frozenset[str]:
        """Validate a subset of element ids."""
        out = frozenset(ids)
        bad = sorted(out - self.element_set)
        if bad:
            raise StructureError(f"unknown element id {bad[0]!r}")
        return out

    def extend(self, sorts: Mapping[str, str] = {}, tuples: Iterable[tuple[str, Iterable[str]]] = ()) -> "Structure":
        clash = set(sorts) & self.element_set
        if clash:
            raise StructureError(f"id collision: {sorted(clash)[0]!r}")
        new_sorts = dict(self._sorts)
        new_sorts.update(sorts)
        return Structure(self.kind, new_sorts, list(self.tuples) + list(tuples))

    def rename(self, mapping: Mapping[str, str]) -> "Structure":
        f = lambda x: mapping.get(x, x)
        sorts = {f(x): s for x, s in self._sorts.items()}
        if len(sorts) != len(self._sorts):
            raise StructureError("renaming is not injective")
        return Structure(self.kind, sorts, [(n, tuple(map(f, a))) for n, a in self.tuples])

    def with_kind(self, kind: Kind) -> "Structure":
        return Structure(kind, self._sorts, self.tuples)


def induced_substructure(M: Structure, S: Iterable[str]) -> Structure:
    keep = M.subset(S)
    if keep == M.element_set:
        return M
    sorts = {x: M.sort_of(x) for x in keep}
    return Structure(M.kind, sorts, [t for t in M.tuples if keep.issuperset(t[1])])


def empty(kind: Kind) -> Structure:
    return Structure(kind, {})


FILTERS = ("full", "incidence", "parallelism")


def gaifman_graph(M: Structure, filter: str = "full") -> nx.Graph:
    """Gaifman graph of ``M`` restricted to incidence or local-equivalence symbols."""
    if filter not in FILTERS:
        raise StructureError(f"unknown relation filter {filter!r}")
    G = nx.Graph()
    G.add_nodes_from(M.elements)
    for name, args in M.tuples:
        kind = M.kind.symbols[name].kind
        if filter == "incidence" and kind != INCIDENCE:
            continue
        if filter == "parallelism" and kind != LOCAL_EQ:
            continue
        for a, b in combinations(sorted(set(args)), 2):
            G.add_edge(a, b)
    return G


def distance(M: Structure, X: Iterable[str], Y: Iterable[str], filter: str = "full") -> float:
    """Minimum graph distance between two nonempty sets; ``math.inf`` if unreachable."""
    X, Y = M.subset(X), M.subset(Y)
    if not X or not Y:
        raise StructureError("distance needs nonempty sets")
    if X & Y:
        return 0
    G = gaifman_graph(M, filter)
    lengths = nx.multi_source_dijkstra_path_length(G, X)
    found = [lengths[y] for y in Y if y in lengths]
    return min(found) if found else math.inf


def girth_and_bipartite(M: Structure) -> tuple[float, bool]:
    """Girth of the incidence Gaifman graph and whether sorts give a bipartition."""
    G = gaifman_graph(M, "incidence")
    g = nx.girth(G)
    if len(M.kind.sorts) == 1:
        bip = nx.is_bipartite(G)
    else:
        bip = all(M.sort_of(a) != M.sort_of(b) for a, b in G.edges)
    return g, bip


def components(M: Structure, filter: str = "full") -> list[frozenset[str]]:
    G = gaifman_graph(M, filter)
    return sorted((frozenset(c) for c in nx.connected_components(G)), key=lambda c: sorted(c))


def _same_over(M: Structure, A: frozenset[str], ext: Structure) -> None:
    for a in A:
        if a not in M or a not in ext or M.sort_of(a) != ext.sort_of(a):
            raise StructureError(f"base element {a!r} is not shared")
    if {t for t in M.tuples if A.issuperset(t[1])} != {t for t in ext.tuples if A.issuperset(t[1])}:
        raise StructureError("base is embedded differently")


def iter_embeddings_over(M: Structure, A: Iterable[str], ext: Structure) -> Iterator[dict[str, str]]:
    """Embeddings of ``ext`` into ``M`` that fix ``A`` pointwise.

    Embeddings preserve and reflect every relation, so the image is an induced
    copy.  Search is plain backtracking with sort, label and neighbourhood
    filtering.
    """
    A = frozenset(A)
    _same_over(M, A, ext)
    if M.kind.symbols != ext.kind.symbols:
        raise StructureError("signatures differ")
    new = [x for x in ext.elements if x not in A]
    free = [y for y in M.elements if y not in A]

    def base_profile(S: Structure, x: str) -> tuple:
        return (S.sort_of(x), S.labels(x), S.inc(x) & A)

    cand = {x: [y for y in free if base_profile(M, y) == base_profile(ext, x)] for x in new}
    # most constrained first
    new.sort(key=lambda x: (len(cand[x]), -len(ext.adj(x)), x))

    f: dict[str, str] = {a: a for a in A}
    used: set[str] = set()

    def image(name: str, args: tuple[str, ...], g: Mapping[str, str]) -> Tuple_:
        img = tuple(g[a] for a in args)
        if M.kind.symbols[name].kind == LOCAL_EQ:
            img = tuple(sorted(img[:2])) + img[2:]
        elif len(img) == 2 and M.kind.symbols[name].profile[0] == M.kind.symbols[name].profile[1]:
            img = tuple(sorted(img))
        return (name, img)

    def consistent(x: str, y: str) -> bool:
        for name, args in ext.tuples_with(x):
            if all(a in f for a in args) and image(name, args, f) not in M.tuples:
                return False
        inv = {v: k for k, v in f.items()}
        for name, args in M.tuples_with(y):
            if all(a in inv for a in args) and image(name, args, inv) not in ext.tuples:
                return False
        return True

    def rec(i: int) -> Iterator[dict[str, str]]:
        if i == len(new):
            yield dict(f)
            return
        x = new[i]
        for y in cand[x]:
            if y in used:
                continue
            f[x] = y
            used.add(y)
            if consistent(x, y):
                yield from rec(i + 1)
            del f[x]
            used.discard(y)

    yield from rec(0)


def count_copies_over(M: Structure, A: Iterable[str], ext: Structure) -> int:
    """Number of distinct images of embeddings of ``ext`` into ``M`` over ``A``."""
    images = {frozenset(f.values()) for f in iter_embeddings_over(M, A, ext)}
    return len(images)


def is_isomorphic(M: Structure, N: Structure) -> bool:
    if len(M) != len(N) or len(M.tuples) != len(N.tuples) or M.kind != N.kind:
        return False
    return next(iter_embeddings_over(M, (), N), None) is not None
