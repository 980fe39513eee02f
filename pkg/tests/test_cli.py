import json

import pytest

from hyperbell import circuits as cx
from hyperbell.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_tables_pass(capsys):
    code, out, _ = run(capsys, "tables")
    assert code == 0
    assert "Table 1 (kw-reference): match" in out
    assert "7/7" in out
    assert "OVERLAPS" not in out


def test_tables_json(capsys, tmp_path):
    path = tmp_path / "t.json"
    code, out, _ = run(capsys, "tables", "--format", "json", "--json", str(path))
    doc = json.loads(out)
    assert code == 0 and doc["ok"] and doc["schema"] == "hyperbell/1"
    assert json.loads(path.read_text())["tables"][0]["matches_golden"]
    assert all(v["disjoint_from_classes"] for v in doc["starred"].values())


def test_tampered_golden_fails(capsys, tmp_path):
    data = cx.golden_table(1).to_json()
    a, b = data["classes"][0]["members"], data["classes"][1]["members"]
    a[0], b[0] = b[0], a[0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "tables", "--table1", str(path))
    assert code == 1
    assert "MISMATCH" in out


def test_unreadable_golden_is_usage_error(capsys, tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert run(capsys, "tables", "--table2", str(path))[0] == 2
    assert run(capsys, "tables", "--table2", str(tmp_path / "missing.json"))[0] == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["nonsense"],
        [],
        ["bounds", "--n", "0"],
        ["bounds", "--dims", "2,x"],
        ["teleport", "--trials", "0"],
        ["sweep", "--subset", "Phi+*phi+,Bogus"],
        ["sweep", "--symmetry-reduce", "--limit", "3"],
        ["partition", "--circuit", "/nonexistent.json"],
    ],
)
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_bad_thread_env(capsys, monkeypatch):
    monkeypatch.setenv("HYPERBELL_THREADS", "many")
    assert run(capsys, "sweep", "--limit", "1", "--restarts", "2", "--quiet")[0] == 2


def test_partition_command(capsys, tmp_path, kw):
    path = tmp_path / "kw.json"
    kw.dump(path)
    code, out, _ = run(capsys, "partition", "--circuit", str(path), "--format", "json")
    assert code == 0
    assert len(json.loads(out)["classes"]) == 7
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"elements": [{"type": "Laser"}]}))
    assert run(capsys, "partition", "--circuit", str(bad))[0] == 2


def test_sweep_subset(capsys):
    labels = "Phi+*phi+,Phi+*phi-,Phi+*psi+,Phi+*psi-,Phi-*phi+,Phi-*phi-,Phi-*psi+,Phi-*psi-"
    code, out, _ = run(capsys, "sweep", "--subset", labels, "--restarts", "20", "--format", "json")
    assert code == 0
    assert json.loads(out)["report"]["verdict"] == "infeasible"


def test_sweep_smoke(capsys, tmp_path):
    out_path, csv_path = tmp_path / "s.json", tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--limit", "4", "--restarts", "20", "--threads", "1", "--quiet",
                     "--out", str(out_path), "--csv", str(csv_path))
    assert code == 0
    doc = json.loads(out_path.read_text())
    assert doc["summary"]["octets"] == 4
    assert doc["provenance"]["restarts"] == 20
    assert len(csv_path.read_text().splitlines()) == 5


def test_no_metadata_is_byte_identical(capsys):
    argv = ["dense", "--trials", "3", "--format", "json", "--no-metadata"]
    first = run(capsys, *argv)[1]
    second = run(capsys, *argv)[1]
    assert first == second
    assert "metadata" not in json.loads(first)
    assert "metadata" in json.loads(run(capsys, "dense", "--trials", "3", "--format", "json")[1])


def test_dense_text(capsys):
    code, out, _ = run(capsys, "dense", "--trials", "5")
    assert code == 0
    assert "log2 7 = 2.8074" in out
    assert "0.8819" in out and "0.9411" in out


def test_protocol_commands(capsys, tmp_path):
    assert run(capsys, "twocopy", "--trials", "2")[0] == 0
    csv_path = tmp_path / "fp.csv"
    assert run(capsys, "fingerprint", "--trials", "1", "--csv", str(csv_path))[0] == 0
    assert len(csv_path.read_text().splitlines()) == 7
    code, out, _ = run(capsys, "teleport", "--trials", "2000")
    assert code == 0 and "exact 0.5000" in out


def test_bounds_and_worked(capsys):
    assert run(capsys, "bounds", "--n", "1")[0] == 0
    code, out, _ = run(capsys, "bounds", "--dims", "3,3")
    assert code == 0 and "18" in out
    code, out, _ = run(capsys, "worked")
    assert code == 0 and "contradiction: True" in out


def test_calibrate_first_hit(capsys, tmp_path):
    path = tmp_path / "hit.json"
    code, out, _ = run(capsys, "calibrate", "--target", "1", "--space", "default", "--limit", "1", "--out", str(path))
    assert code == 0
    cfg = cx.CircuitConfig.load(path)
    assert cx.partition_states(cfg).member_sets() == cx.golden_table(1).member_sets()


def test_tables_lists_seven_and_seven(capsys):
    code, out, _ = run(capsys, "tables", "--format", "json")
    doc = json.loads(out)
    assert [len(t["classes"]) for t in doc["tables"]] == [7, 7]


def test_bounds_two(capsys):
    code, out, _ = run(capsys, "bounds", "--n", "2")
    assert code == 0
    assert "at most 8" in out and "7 classes" in out


def test_teleport_ten_thousand(capsys):
    code, out, _ = run(capsys, "teleport", "--trials", "10000", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and 0.48 <= doc["frequency"] <= 0.52


def test_symmetry_reduced_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--symmetry-reduce", "--quiet", "--format", "json", "--no-metadata")
    doc = json.loads(out)
    assert code == 0
    assert doc["summary"]["counts"]["infeasible"] == 12870
    assert doc["summary"]["solved"] == doc["summary"]["orbits"] == 9
