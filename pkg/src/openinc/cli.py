"""Command-line entry point. Exit codes: 0 true/success, 1 false/closed, 2 error."""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import asdict

from . import fixtures
from .construction import AmalgamError, free_amalgam, free_completion, independent_icl
from .kinds import validate_T_forall
from .openness import (HFOrder, closed_witness_bruteforce, gaifman_closure, hf_closure,
                       intrinsic_closure, is_open_over, verify_hf_order)
from .predimension import DeltaSpec, delta
from .structure import StructureError
from .textio import Document, ParseError, emit_certificate, emit_json, natural_key, parse, serialize


class UsageError(Exception):
    pass


def load(path: str) -> Document:
    if os.path.exists(path):
        with open(path, encoding="utf-8") as fh:
            return parse(fh.read())
    name = os.path.basename(path)
    name = name[:-4] if name.endswith(".txt") else name
    if name in fixtures.NAMES and name != "ngon4-amalgam-fail":
        return fixtures.load_document(name)
    raise UsageError(f"no such file: {path}")


def resolve(doc: Document, text: str | None) -> frozenset[str]:
    """A subset name from the document, or comma/space separated ids."""
    if not text:
        return frozenset()
    if text in doc.subsets:
        return frozenset(doc.subsets[text])
    ids = [t for t in text.replace(",", " ").split() if t]
    unknown = [t for t in ids if t not in doc.structure]
    if unknown:
        raise UsageError(f"unknown ids or subset: {', '.join(unknown)}")
    return frozenset(ids)


def _ids(S) -> str:
    return " ".join(sorted(S, key=natural_key))


def cmd_validate(a) -> int:
    doc = load(a.file)
    bad = validate_T_forall(doc.structure)
    if not bad:
        print("valid")
        return 0
    for v in bad:
        print(v)
    return 1


def cmd_open(a) -> int:
    doc = load(a.file)
    cert = is_open_over(doc.structure, resolve(doc, a.over))
    print(emit_certificate(cert, doc.kind))
    return 0 if cert.is_open else 1


def cmd_hforder(a) -> int:
    doc = load(a.file)
    A = resolve(doc, a.over)
    if a.verify:
        if doc.order is None:
            raise UsageError("document declares no order to verify")
        res = verify_hf_order(doc.structure, A, doc.order, mode=a.verify)
        print("HF-order verified" if res.ok else f"not an HF-order: {res.message}")
        return 0 if res.ok else 1
    cert = is_open_over(doc.structure, A)
    print(emit_certificate(cert, doc.kind))
    return 0 if cert.is_open else 1


def cmd_closure(a) -> int:
    doc = load(a.file)
    M = doc.structure
    S = resolve(doc, a.set)
    if a.kind == "gaifman":
        out = gaifman_closure(M, S)
    elif a.kind == "intrinsic":
        out = intrinsic_closure(M, S, bound=a.bound)
    else:
        if a.order in (None, "declared"):
            hf = doc.order
        elif a.order in doc.subsets:
            hf = HFOrder.singletons(doc.subsets[a.order])
        else:
            raise UsageError(f"unknown order {a.order!r}")
        if hf is None:
            raise UsageError("hf closure needs an order")
        base = M.element_set - set(hf.order)
        out = hf_closure(M, hf, S, base)
    print(_ids(out))
    return 0


def cmd_amalgamate(a) -> int:
    db, dc = load(a.b), load(a.c)
    A = resolve(db, a.over)
    M = free_amalgam(db.structure, dc.structure, A)
    print(serialize(Document(M, {"A": tuple(sorted(A, key=natural_key))})), end="")
    bad = validate_T_forall(M)
    for v in bad:
        print(f"# invalid: {v}")
    return 1 if bad else 0


def cmd_complete(a) -> int:
    doc = load(a.file)
    run = free_completion(doc.structure, a.stages, a.cap, a.multiplicity,
                          projective_stage=not a.no_projective_stage)
    payload = {
        "stage": run.stage,
        "truncated": run.truncated,
        "added": run.added,
        "provenance": {x: asdict(p) for x, p in sorted(run.provenance.items())},
        "structure": serialize(run.structure),
    }
    print(emit_json(payload))
    return 0


def cmd_delta(a) -> int:
    doc = load(a.file)
    spec = None
    if a.weights:
        try:
            spec = DeltaSpec(*(int(w) for w in a.weights.split(",")))
        except (TypeError, ValueError):
            raise UsageError("--weights expects three integers p,b,i") from None
    print(delta(doc.structure, spec))
    return 0


def cmd_witness(a) -> int:
    w = fixtures.builtin(a.name)
    if not isinstance(w, fixtures.WitnessConfig):
        raise UsageError(f"{a.name} is not a witness configuration")
    rep = fixtures.verify_c6(w, a.kmax)
    for line in rep.lines():
        print(line)
    return 0 if rep.ok else 1


def cmd_independent(a) -> int:
    doc = load(a.file)
    r = independent_icl(doc.structure, resolve(doc, a.a), resolve(doc, a.b), resolve(doc, a.c), a.bound)
    print(emit_json({
        "applicable": r.applicable,
        "independent": r.independent,
        "reason": r.reason,
        "icl_a": sorted(r.icl_a, key=natural_key),
        "icl_ab": sorted(r.icl_ab, key=natural_key),
        "icl_ac": sorted(r.icl_ac, key=natural_key),
        "icl_abc": sorted(r.icl_abc, key=natural_key),
    }))
    return 0 if r.independent else 1


def cmd_oracle(a) -> int:
    doc = load(a.file)
    A = resolve(doc, a.over)
    cert = is_open_over(doc.structure, A)
    brute = closed_witness_bruteforce(doc.structure, A, bound=a.bound)
    agree = cert.is_open == (brute is None)
    print(f"peeling: {cert.verdict}")
    print(f"brute force: {'open' if brute is None else 'closed ' + _ids(brute)}")
    print("agree" if agree else "DISAGREE")
    return 0 if agree else 1


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="openinc", description="Open incidence structures toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("validate", help="check the universal axioms of the kind")
    s.add_argument("file")
    s.set_defaults(fn=cmd_validate)

    s = sub.add_parser("open", help="decide openness by peeling")
    s.add_argument("file")
    s.add_argument("--over")
    s.set_defaults(fn=cmd_open)

    s = sub.add_parser("hforder", help="compute or verify an HF-order")
    s.add_argument("file")
    s.add_argument("--over")
    s.add_argument("--verify", choices=("fast", "exhaustive"))
    s.set_defaults(fn=cmd_hforder)

    s = sub.add_parser("closure", help="Gaifman, HF or intrinsic closure")
    s.add_argument("file")
    s.add_argument("--set", required=True)
    s.add_argument("--kind", required=True, choices=("gaifman", "hf", "intrinsic"))
    s.add_argument("--order")
    s.add_argument("--bound", type=int, default=16)
    s.set_defaults(fn=cmd_closure)

    s = sub.add_parser("amalgamate", help="free amalgam of two structures")
    s.add_argument("b")
    s.add_argument("c")
    s.add_argument("--over")
    s.set_defaults(fn=cmd_amalgamate)

    s = sub.add_parser("complete", help="finite prefix of the free completion")
    s.add_argument("file")
    s.add_argument("--stages", type=int, required=True)
    s.add_argument("--cap", type=int, required=True)
    s.add_argument("--multiplicity", type=int)
    s.add_argument("--no-projective-stage", action="store_true")
    s.set_defaults(fn=cmd_complete)

    s = sub.add_parser("delta", help="predimension")
    s.add_argument("file")
    s.add_argument("--weights")
    s.set_defaults(fn=cmd_delta)

    s = sub.add_parser("witness", help="check a built-in witness configuration")
    s.add_argument("name")
    s.add_argument("--kmax", type=int, default=3)
    s.set_defaults(fn=cmd_witness)

    s = sub.add_parser("independent", help="independence via intrinsic closures")
    s.add_argument("file")
    s.add_argument("--a", default="")
    s.add_argument("--b", default="")
    s.add_argument("--c", default="")
    s.add_argument("--bound", type=int, default=16)
    s.set_defaults(fn=cmd_independent)

    s = sub.add_parser("oracle", help="cross-check peeling against brute force")
    s.add_argument("file")
    s.add_argument("--over")
    s.add_argument("--bound", type=int, default=18)
    s.set_defaults(fn=cmd_oracle)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.fn(args)
    except (UsageError, ParseError, StructureError, AmalgamError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
