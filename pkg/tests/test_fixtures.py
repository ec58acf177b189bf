import hashlib
from importlib import resources

import pytest

from openinc import (builtin, free_amalgam, girth_and_bipartite, is_open_over, validate_T_forall,
                     verify_c6, verify_hf_order)
from openinc.fixtures import AmalgamFixture, FixtureError, WitnessConfig, fixture_text


def test_steiner_witness_shape():
    w = builtin("steiner23-c6")
    M = w.structure
    assert (len(M.points), len(M.blocks), M.incidence_count) == (8, 5, 15)
    assert (w.first, w.second, w.last) == ("c0", "c1", "c12")


def test_net_witness_classes():
    M = builtin("net3-c6").structure
    assert len(M.points) == 8
    for cls, lines in {"P0": "c2 c5 c12", "P1": "c3 c6 c13 c15", "P2": "c4 c7 c11 c17"}.items():
        assert {l for l in M.blocks if cls in M.labels(l)} == set(lines.split())


def test_moebius_witness_block_column():
    M = builtin("moebius-c6").structure
    assert set(M.blocks) == {"c4", "c5", "c6", "c7", "c11", "c13", "c15"}
    assert M.inc("c4") == {"c0", "c1", "c2", "c8", "c14"}


@pytest.mark.parametrize("name", ["steiner23-c6", "net3-c6", "moebius-c6"])
def test_declared_orders_verify(name):
    w = builtin(name)
    assert validate_T_forall(w.structure) == []
    for mode in ("fast", "exhaustive"):
        assert verify_hf_order(w.structure, (), w.hforder, mode).ok


def test_steiner_and_moebius_pass_all_clauses():
    for name in ("steiner23-c6", "moebius-c6"):
        rep = verify_c6(builtin(name), 4)
        assert rep.ok, rep.lines()


def test_moebius_clause_b_witness():
    w = builtin("moebius-c6")
    cert = is_open_over(w.structure, {"c16"})
    assert w.structure.sort_of("c16") == w.structure.sort_of("c0") == "point"
    assert not cert.is_open and cert.witness


def test_net_iterate_breaks_a_class_axiom():
    # gluing c18 onto c0 puts a point on two lines of class P1
    rep = verify_c6(builtin("net3-c6"), 2)
    assert rep.clause_a and rep.clause_b and rep.clause_c[1]
    assert not rep.clause_c[2]
    assert any("P1" in note for note in rep.notes)


def test_amalgam_fixture():
    f = builtin("ngon4-amalgam-fail")
    assert isinstance(f, AmalgamFixture) and f.A == {"a1", "a2", "b1", "b2"}
    assert girth_and_bipartite(free_amalgam(f.B, f.C, f.A))[0] == 6
    assert [v.axiom for v in validate_T_forall(f.amalgam)] == ["girth"]


def test_unknown_fixture():
    with pytest.raises(FixtureError):
        builtin("fano")


def test_checksums_match_files():
    root = resources.files("openinc").joinpath("data")
    for line in root.joinpath("SHA256SUMS").read_text().splitlines():
        digest, name = line.split()
        assert hashlib.sha256(root.joinpath(name).read_bytes()).hexdigest() == digest
        assert fixture_text(name[:-4])


def test_checksum_mismatch_is_detected(monkeypatch):
    from openinc import fixtures
    monkeypatch.setattr(fixtures, "_checksums", lambda: {"steiner23-c6.txt": "0" * 64})
    with pytest.raises(FixtureError, match="checksum"):
        fixture_text("steiner23-c6")


def test_witness_config_requires_order():
    from openinc.textio import parse
    with pytest.raises(FixtureError):
        WitnessConfig.from_document(parse("geometry steiner k=2 n=3\nsort point: a\n"))
