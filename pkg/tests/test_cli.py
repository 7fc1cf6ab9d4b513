import json
from pathlib import Path

import pytest

from spheremaps import cli
from spheremaps.bounds import q_bounds
from spheremaps.hopf import chain_witness, clifford_system
from spheremaps.sphere_maps import (
    MatrixPolyMap,
    SphereMap,
    constant_map,
    reflection_map,
)

DATA = Path(cli.__file__).parent / "data"


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


# exit codes


def test_qtable_text(capsys):
    code, out, _ = run(["qtable", "--max-n", 15], capsys)
    assert code == cli.EXIT_OK
    assert out.strip()


def test_qtable_json_matches_bounds(capsys):
    code, out, _ = run(["qtable", "--max-n", 20, "--format", "json"], capsys)
    assert code == 0
    rows = json.loads(out)
    lookup = {r["n"]: r for r in rows}
    for n in (2, 8, 15, 16, 20):
        assert (lookup[n]["q_lower"], lookup[n]["q_upper"]) == (q_bounds(n).lower, q_bounds(n).upper)
    assert lookup[15]["q_lower"] == 8 and lookup[15]["exact"]


def test_qtable_csv_and_verify(capsys):
    code, out, _ = run(["qtable", "--max-n", 8, "--format", "csv", "--verify"], capsys)
    assert code == 0
    assert len(out.strip().splitlines()) == 8  # header + n = 2..8


def test_verify_shipped_maps(capsys):
    code, out, _ = run(["verify-map", DATA / "hopf_s3.json"], capsys)
    assert code == 0 and json.loads(out)["passed"]
    code, out, _ = run(["verify-map", DATA / "broken.json"], capsys)
    assert code == cli.EXIT_FAIL
    assert json.loads(out)["residuals"]


@pytest.mark.parametrize("argv", [
    ["nonsense"],
    ["qtable"],
    ["qtable", "--max-n", "1"],
    ["verify-map", "/nonexistent/map.json"],
    ["hopf"],
    ["hopf", "--m", "2", "--odd", "1"],
    ["hopf", "--chain", "nope"],
    ["hodge-check", "--dim", "5"],
    ["wilson", "--group", "/nonexistent.json"],
])
def test_input_errors_exit_2(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == cli.EXIT_INPUT


def test_malformed_json_exit_2(tmp_path, capsys):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    assert run(["verify-map", p], capsys)[0] == 2
    p.write_text(json.dumps({"kind": "mystery"}))
    assert run(["verify-map", p], capsys)[0] == 2


def test_thread_env_validation(monkeypatch, capsys):
    monkeypatch.setenv("SPHEREMAP_THREADS", "zero")
    assert run(["qtable", "--max-n", 4], capsys)[0] == 2
    monkeypatch.setenv("SPHEREMAP_THREADS", "0")
    assert run(["qtable", "--max-n", 4], capsys)[0] == 2


def test_results_independent_of_thread_cap(monkeypatch, capsys):
    monkeypatch.setenv("SPHEREMAP_THREADS", "1")
    one = run(["qtable", "--max-n", 12, "--verify", "--format", "json"], capsys)
    monkeypatch.setenv("SPHEREMAP_THREADS", "2")
    two = run(["qtable", "--max-n", 12, "--verify", "--format", "json"], capsys)
    assert one[:2] == two[:2]
    assert cli.parallel_map(abs, [-1, 2, -3]) == [1, 2, 3]


# verbs with output files


def test_hopf_roundtrip_and_certificate(tmp_path, capsys):
    out, cert = tmp_path / "m.json", tmp_path / "c.json"
    code, _, _ = run(["hopf", "--chain", "S31_to_S16", "--out", out, "--certificate", cert], capsys)
    assert code == 0
    F = SphereMap.from_json(json.loads(out.read_text()))
    assert F == chain_witness("S31_to_S16")
    c = json.loads(cert.read_text())
    assert c["passed"] and c["invariants"]["degree_repr"] == 4
    assert c["object_sha256"] == cli.object_hash(c["object"])
    # the written map verifies again through the CLI
    assert run(["verify-map", out], capsys)[0] == 0


@pytest.mark.parametrize("argv", [["--m", "4"], ["--odd", "2"]])
def test_hopf_variants(argv, capsys):
    code, out, _ = run(["hopf", *argv], capsys)
    assert code == 0
    assert SphereMap.from_json(json.loads(out)).degree_repr == 2


def test_clifford_certificate(tmp_path, capsys):
    cert = tmp_path / "c.json"
    code, out, _ = run(["clifford", "--m", 16, "--certificate", cert], capsys)
    assert code == 0
    c = json.loads(cert.read_text())
    assert c["invariants"]["structure_count"] == 8
    assert c["passed"] and c["invariants"]["normed_identity"]
    assert json.loads(out) == clifford_system(16).to_json()


def test_hodge_check(capsys):
    code, out, _ = run(["hodge-check", "--dim", 4, "--trials", 3], capsys)
    assert code == 0
    rep = json.loads(out)
    assert rep["isometry"] and rep["fiber_map_matches_hopf"]
    assert rep["equivariance"] == {"trials": 3, "failures": 0}


def test_harmonic_degree(capsys):
    code, out, _ = run(["harmonic-degree", DATA / "hopf_s3.json"], capsys)
    assert code == 0
    assert json.loads(out) == {"degrees": [2, 2, 2], "max": 2}
    code, out, _ = run(["harmonic-degree", DATA / "hopf_s3.json", "--format", "text"], capsys)
    assert out.splitlines() == ["2 2 2", "max 2"]


def test_wilson_verb(tmp_path, capsys):
    rep = tmp_path / "spectrum.json"
    code, out, err = run([
        "wilson", "--group", DATA / "group_perturbed.json", "--bundle", DATA / "bundle_u2.json",
        "--max-word-len", 4, "--spectrum-report", rep,
    ], capsys)
    assert code == 0
    entries = json.loads(out)
    assert entries and all(e["length"] > 0 for e in entries)
    lengths = [e["length"] for e in entries]
    assert lengths == sorted(lengths)
    assert json.loads(rep.read_text())["simple"]
    assert "classes" in err


def test_wilson_symmetric_reports_collision(tmp_path, capsys):
    rep = tmp_path / "spectrum.json"
    run(["wilson", "--group", DATA / "group_symmetric.json", "--bundle", DATA / "bundle_sign.json",
         "--max-word-len", 2, "--spectrum-report", rep], capsys)
    r = json.loads(rep.read_text())
    assert not r["simple"]
    assert ["a", "b"] in [c[:2] for c in r["collisions"]]


def test_wilson_rank_mismatch(tmp_path, capsys):
    b = tmp_path / "b.json"
    b.write_text(json.dumps({"rank": 1, "field": "R", "images": [[["1"]]]}))
    assert run(["wilson", "--group", DATA / "group_perturbed.json", "--bundle", b], capsys)[0] == 2


def test_same_seed_same_bytes(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(["hodge-check", "--dim", 4, "--trials", 2, "--seed", 7, "--out", a], capsys)
    run(["hodge-check", "--dim", 4, "--trials", 2, "--seed", 7, "--out", b], capsys)
    assert a.read_bytes() == b.read_bytes()


# certificates


def test_constant_map_certificate():
    c = cli.certificate(constant_map(3, 2, [0, 1, 0]))
    assert c["passed"] and c["invariants"]["is_constant"] is True


def test_matrix_and_projector_certificates():
    R = reflection_map(3, "R")
    c = cli.certificate(R)
    assert c["kind"] == "matrix_map" and c["passed"]
    assert MatrixPolyMap.from_json(c["object"]) == R
    with pytest.raises(TypeError):
        cli.certificate(42)


def test_emit_certificate_atomic(tmp_path):
    path = tmp_path / "cert.json"
    path.write_text("old")
    c = cli.emit_certificate(chain_witness("S31_to_S16"), str(path), provenance=["chain"], seeds={"seed": 0})
    assert json.loads(path.read_text()) == c
    assert c["provenance"] == ["chain"]
    assert [p.name for p in tmp_path.iterdir()] == ["cert.json"]


def test_write_atomic_leaves_no_temp_on_failure(tmp_path):
    with pytest.raises(TypeError):
        cli.write_atomic(str(tmp_path / "x.json"), None)
    assert list(tmp_path.iterdir()) == []


def test_load_map_kinds():
    F = chain_witness("S31_to_S16")
    assert cli.load_map(F.to_json()) == F
    R = reflection_map(2, "C")
    assert cli.load_map(R.to_json()) == R
    with pytest.raises(cli.InputError):
        cli.load_map([1, 2])
