"""Predimension functions and a randomized check of their axioms."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import AbstractSet, Iterable

from .kinds import classify_one_step
from .openness import is_strong
from .sampling import one_step_candidates, random_structure
from .structure import Kind, Structure, StructureError, induced_substructure


@dataclass(frozen=True)
class DeltaSpec:
    point: int
    block: int
    incidence: int


# weights exactly as printed for projective planes; they fail the axioms
PRINTED_PROJECTIVE = DeltaSpec(1, 1, -2)


def default_spec(kind: Kind) -> DeltaSpec:
    if kind.name == "steiner":
        return DeltaSpec(1, kind.k, -1)
    if kind.is_ngon and kind.n == 3:
        return DeltaSpec(2, 2, -1)
    raise StructureError(f"no default predimension for {kind.name}; pass explicit weights")


def delta_of(M: Structure, S: AbstractSet[str], spec: DeltaSpec) -> int:
    pts = blocks = inc = 0
    ps = M.kind.point_sort
    for x in S:
        if M.sort_of(x) == ps:
            pts += 1
        else:
            blocks += 1
        inc += len(M.inc(x) & S)
    if len(M.kind.sorts) == 1:
        blocks = 0
    return spec.point * pts + spec.block * blocks + spec.incidence * (inc // 2)


def delta(M: Structure, spec: DeltaSpec | None = None) -> int:
    """Weighted count of points, blocks and incidences."""
    spec = spec or default_spec(M.kind)
    return delta_of(M, M.element_set, spec)


def leq_delta(M: Structure, A: AbstractSet[str], B: Iterable[str] | None = None,
              spec: DeltaSpec | None = None) -> bool:
    """``A cap B <=_delta B``: no subset of ``B`` has smaller delta than its trace on ``A``."""
    spec = spec or default_spec(M.kind)
    B = sorted(M.element_set if B is None else B)
    for r in range(len(B) + 1):
        for B0 in combinations(B, r):
            S = frozenset(B0)
            if delta_of(M, S & A, spec) > delta_of(M, S, spec):
                return False
    return True


def one_step_extensions(A: Structure, name: str = "new") -> list[Structure]:
    """All valid extensions of ``A`` by one strong candidate tuple."""
    return one_step_candidates(A, name)


@dataclass
class DeltaReport:
    kind: Kind
    samples: int
    checked: dict[str, int] = field(default_factory=lambda: {"a": 0, "b": 0, "c": 0, "d": 0})
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def check_delta_axioms(kind: Kind, samples: int, seed: int, spec: DeltaSpec | None = None,
                       max_size: int = 8) -> DeltaReport:
    """Randomized check of isomorphism invariance, strong => delta-strong,
    algebraic <=> delta-preserving on minimal steps, and restriction of delta-strongness."""
    spec = spec or default_spec(kind)
    rng = random.Random(seed)
    rep = DeltaReport(kind, samples)
    for i in range(samples):
        B, steps = random_structure(kind, rng.randint(1, max_size), rng, open_only=True)
        # (a)
        perm = list(B.elements)
        rng.shuffle(perm)
        relabelled = B.rename({x: f"r{j}" for j, x in enumerate(perm)})
        rep.checked["a"] += 1
        if delta(relabelled, spec) != delta(B, spec):
            rep.failures.append(f"(a) sample {i}: relabelling changes delta")
        # (b): prefixes of the build order are strong
        cut = rng.randint(0, len(steps))
        A = frozenset(x for st in steps[:cut] for x in st)
        rep.checked["b"] += 1
        if is_strong(B, A) and not leq_delta(B, A, spec=spec):
            rep.failures.append(f"(b) sample {i}: strong prefix {sorted(A)} is not delta-strong")
        # (c) on every minimal one-step extension of a small prefix
        if len(A) <= 5:
            base = induced_substructure(B, A)
            for X in one_step_extensions(base):
                cls = classify_one_step(X, A)
                if cls.tag in ("not-strong", "not-minimal"):
                    continue
                rep.checked["c"] += 1
                same = delta(X, spec) == delta(base, spec)
                if same != (cls.tag == "algebraic"):
                    rep.failures.append(f"(c) sample {i}: {cls.tag} step changes delta by "
                                        f"{delta(X, spec) - delta(base, spec)}")
        # (d)
        A2 = frozenset(x for x in B.elements if rng.random() < 0.5)
        if leq_delta(B, A2, spec=spec):
            C = frozenset(x for x in B.elements if rng.random() < 0.6)
            rep.checked["d"] += 1
            if not leq_delta(B, A2 & C, C, spec):
                rep.failures.append(f"(d) sample {i}: restriction to {sorted(C)} breaks delta-strongness")
    return rep
