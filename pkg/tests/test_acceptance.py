"""Acceptance suite: one PASS/FAIL line per criterion."""

import random
import re
import time
from dataclasses import asdict
from pathlib import Path

import pytest

from openinc import (HFOrder, Kind, Structure, builtin, check_delta_axioms, classify_one_step,
                     closed_witness_bruteforce, count_copies_over, delta, free_amalgam,
                     free_completion, girth_and_bipartite, induced_substructure, is_isomorphic,
                     is_nondegenerate, is_open_over, is_strong, is_valid, iter_embeddings_over,
                     k_iterate, peel, validate_T_forall, verify_c6, verify_hf_order)
from openinc.sampling import DEFAULT_KINDS, corpus_structure, one_step_candidates, random_structure
from openinc.textio import emit_json, serialize


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}")
    return emit


def label(kind):
    return f"{kind.name}{kind.n or kind.k or ''}"


def test_c01_golden_witnesses(report):
    t = time.perf_counter()
    problems = []
    for name in ("steiner23-c6", "net3-c6", "moebius-c6"):
        w = builtin(name)
        if validate_T_forall(w.structure):
            problems.append(f"{name} invalid")
        if not verify_hf_order(w.structure, (), w.hforder, "exhaustive").ok:
            problems.append(f"{name} order rejected")
        rep = verify_c6(w, 4)
        if not rep.ok:
            bad = [line for line in rep.lines() if "FAIL" in line]
            problems.append(f"{name} {', '.join(bad)} ({rep.notes[0]})")
    elapsed = time.perf_counter() - t
    ok = not problems and elapsed < 5
    report(1, ok, f"{elapsed:.2f}s; " + ("all clauses hold" if not problems else "; ".join(problems)))
    assert ok, problems


def test_c02_counterexample(report):
    t = time.perf_counter()
    f = builtin("ngon4-amalgam-fail")
    M = free_amalgam(f.B, f.C, f.A)
    girth = girth_and_bipartite(M)[0]
    rejected = [v.axiom for v in validate_T_forall(M)] == ["girth"]
    elapsed = time.perf_counter() - t
    ok = rejected and girth == 6 and elapsed < 1
    report(2, ok, f"girth {girth} < 8, rejected={rejected}, {elapsed:.3f}s")
    assert ok


def _corpus(kind, n=1000, seed=2024):
    rng = random.Random(seed)
    for _ in range(n):
        M = corpus_structure(kind, rng, max_size=10)
        p = rng.choice((0.0, 0.25, 0.5))
        yield M, frozenset(x for x in M.elements if rng.random() < p)


def test_c03_oracle_equivalence(report):
    t = time.perf_counter()
    tallies = {}
    disagreements = 0
    for kind in DEFAULT_KINDS:
        n_open = n_closed = 0
        for M, A in _corpus(kind):
            peeled = is_open_over(M, A).is_open
            brute = closed_witness_bruteforce(M, A) is None
            disagreements += peeled != brute
            n_open += peeled
            n_closed += not peeled
        tallies[label(kind)] = (n_open, n_closed)
    elapsed = time.perf_counter() - t
    ok = disagreements == 0 and elapsed < 120
    summary = " ".join(f"{k}:{o}/{c}" for k, (o, c) in tallies.items())
    report(3, ok, f"{disagreements} disagreements over 7x1000 (open/closed {summary}), {elapsed:.1f}s")
    assert ok


def test_c04_hforder_equivalence(report):
    bad = 0
    total = 0
    for kind in DEFAULT_KINDS:
        for M, A in _corpus(kind):
            total += 1
            cert = is_open_over(M, A)
            if cert.is_open:
                hf = cert.hforder
            else:
                removed = peel(M, A).removed
                tail = [(x,) for x in sorted(cert.witness)]
                hf = HFOrder(tuple(t.elements for t in reversed(removed)) + tuple(tail))
            fast = verify_hf_order(M, A, hf, "fast").ok
            exhaustive = verify_hf_order(M, A, hf, "exhaustive").ok
            bad += not (fast == exhaustive == cert.is_open)
    report(4, bad == 0, f"{bad} disagreements over {total} instances")
    assert bad == 0


def test_c05_delta_axioms(report):
    reps = [check_delta_axioms(k, 1000, seed=5) for k in (Kind("steiner", k=2, n=3), Kind("projective"))]
    witness = delta(builtin("steiner23-c6").structure)
    failures = sum(len(r.failures) for r in reps)
    checked_c = sum(r.checked["c"] for r in reps)
    ok = failures == 0 and witness == 3
    report(5, ok, f"{failures} failures, {checked_c} minimal extensions checked for (c), delta(witness)={witness}")
    assert ok


def _completion_bytes(A, stages):
    run = free_completion(A, stages, 200)
    return run.added, serialize(run.structure) + emit_json({x: asdict(p) for x, p in run.provenance.items()})


def test_c06_completion_counts(report):
    proj = Structure(Kind("projective"), {f"p{i}": "point" for i in range(4)})
    st = Structure(Kind("steiner", k=2, n=3), {f"p{i}": "point" for i in range(3)})
    pa, pbytes = _completion_bytes(proj, 2)
    sa, sbytes = _completion_bytes(st, 2)
    same = (pbytes, sbytes) == (_completion_bytes(proj, 2)[1], _completion_bytes(st, 2)[1])
    ok = pa == [6, 3] and sa == [3, 3] and same
    report(6, ok, f"projective {pa}, steiner {sa}, byte-identical={same}")
    assert ok


def test_c07_completion_strongness(report):
    failures = 0
    certificates = 0
    for kind in DEFAULT_KINDS:
        rng = random.Random(7)
        seeds = 0
        while seeds < 200:
            A, _ = random_structure(kind, rng.randint(2, 6), rng)
            if not is_nondegenerate(A):
                continue
            seeds += 1
            run = free_completion(A, 4, 300, multiplicity=2)
            for s in range(1, run.stage + 1):
                X = run.stage_structure(s)
                cert = is_open_over(X, A.element_set)
                certificates += 1
                failures += not (cert.is_open and verify_hf_order(X, A.element_set, cert.hforder).ok
                                 and is_valid(X))
    report(7, failures == 0, f"{failures} failures, {certificates} certificates over 7x200 seeds")
    assert failures == 0


def test_c08_amalgamation(report):
    failures = 0
    split = {"amalgam": 0, "embedding": 0}
    for kind in DEFAULT_KINDS:
        rng = random.Random(8)
        done = 0
        while done < 500:
            C, steps = random_structure(kind, rng.randint(1, 9), rng, prefix="c")
            A = frozenset(x for st in steps[: rng.randint(0, len(steps))] for x in st)
            cands = one_step_candidates(induced_substructure(C, A), prefix="b")
            if not cands:
                continue
            B = rng.choice(cands)
            cls = classify_one_step(B, A)
            if cls.tag in ("not-strong", "not-minimal"):
                continue
            done += 1
            if cls.tag != "algebraic" or count_copies_over(C, A, B) < cls.degree:
                split["amalgam"] += 1
                M = free_amalgam(B, C, A)
                ok = is_valid(M) and is_strong(M, B.element_set) and is_strong(M, C.element_set)
            else:
                split["embedding"] += 1
                ok = any(is_strong(C, set(g.values())) for g in iter_embeddings_over(C, A, B))
            failures += not ok
    report(8, failures == 0, f"{failures} failures over 7x500 triples ({split['amalgam']} amalgams, "
                             f"{split['embedding']} strong embeddings)")
    assert failures == 0


def test_c09_iterates(report):
    w = builtin("steiner23-c6")
    sizes = []
    ok = is_isomorphic(k_iterate(w.structure, 1, w.order), w.structure)
    for k in range(1, 5):
        I = k_iterate(w.structure, k, w.order)
        sizes.append(len(I))
        ok &= len(I) == 12 * k + 1 and is_valid(I) and is_open_over(I).is_open
    report(9, ok, f"sizes {sizes}, I_1 isomorphic to witness")
    assert ok


def test_c10_exact_assertions(report):
    pattern = re.compile(r"approx|isclose|allclose|rel_tol|abs_tol")
    root = Path(__file__).parent
    hits = [p.name for p in sorted(root.glob("*.py")) if p.name != Path(__file__).name
            and pattern.search(p.read_text())]
    report(10, not hits, "no tolerance-based comparisons" if not hits else f"tolerances in {hits}")
    assert not hits
