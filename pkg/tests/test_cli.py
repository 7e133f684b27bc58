import json

import pytest

from specmix.cli import main
from specmix.complexes import Hypergraph, gen_complex, gen_hypergraph
from specmix.io import ObjectFormatError, read_object, validate_report, write_object


def _run(tmp_path, *argv):
    return main([str(a) for a in argv])


def _load(path):
    with open(path) as fh:
        return json.load(fh)


def _strip_runtime(doc):
    doc = dict(doc)
    doc.pop("runtime", None)
    return doc


def test_round_trip_objects(tmp_path):
    for obj in (gen_complex("complete", 5, 2), gen_hypergraph("gnp", 8, 3, alpha=0.5, seed=1),
                gen_complex("empty", 5, 2)):
        path = tmp_path / "o.json"
        write_object(obj, path)
        back = read_object(path)
        assert back == obj


def test_duplicate_edge_rejected(tmp_path):
    path = tmp_path / "dup.json"
    write_object(Hypergraph(5, 3, [(0, 1, 2)]), path)
    doc = _load(path)
    doc["edges"].append([2, 1, 0])
    path.write_text(json.dumps(doc))
    with pytest.raises(ObjectFormatError, match=r"\[0, 1, 2\]|0, 1, 2"):
        read_object(path)
    assert main(["verify", "inverse", "--in", str(path)]) == 2


def test_schema_violation_names_path(tmp_path):
    path = tmp_path / "bad.json"
    write_object(Hypergraph(5, 3, [(0, 1, 2)]), path)
    doc = _load(path)
    doc["n"] = "five"
    path.write_text(json.dumps(doc))
    with pytest.raises(ObjectFormatError, match=r"\$\.n"):
        read_object(path)
    path.write_text("{not json")
    with pytest.raises(ObjectFormatError, match="line 1"):
        read_object(path)


def test_gen_and_verify_inverse(tmp_path, capsys):
    h = tmp_path / "h.json"
    assert _run(tmp_path, "gen", "hypergraph", "--kind", "gnp", "--n", 8, "--k", 3, "--alpha", 0.5,
                "--seed", 1, "--out", h) == 0
    assert read_object(h).k == 3
    rep = tmp_path / "r.json"
    assert _run(tmp_path, "verify", "inverse", "--in", h, "--alpha", 0.5, "--out", rep) == 0
    doc = _load(rep)
    validate_report(doc)
    assert doc["report"]["passed"] and doc["report"]["min_margin"] > 0
    assert doc["schema"] == "specmix/1"
    assert doc["conventions"]["log_base_bounds"] == 2
    assert "r_definition" in doc["conventions"]
    assert "--out" not in doc["config"]["command"]
    assert "PASS" in capsys.readouterr().err


def test_verify_mixing_empty_complex(tmp_path):
    c = tmp_path / "c.json"
    assert main(["gen", "complex", "--kind", "empty", "--n", "6", "--d", "2", "--out", str(c)]) == 0
    rep = tmp_path / "r.json"
    assert main(["verify", "mixing", "--in", str(c), "--alpha", "0", "--out", str(rep)]) == 0
    doc = _load(rep)
    validate_report(doc)
    assert doc["report"]["passed"]
    assert all(m == 0 for m in doc["report"]["margins"])


def test_spectrum_and_discrepancy_stdout(tmp_path, capsys):
    c = tmp_path / "c.json"
    main(["gen", "complex", "--kind", "complete", "--n", "6", "--d", "1", "--out", str(c)])
    capsys.readouterr()
    csv_path = tmp_path / "A.csv"
    assert main(["spectrum", "--in", str(c), "--operator", "A", "--dump-matrix", str(csv_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    validate_report(doc)
    assert doc["report"]["value"] == pytest.approx(1.0)
    assert csv_path.exists()
    assert main(["discrepancy", "--in", str(c), "--alpha", "5", "--mode", "singleton-tail"]) == 0
    doc = json.loads(capsys.readouterr().out)
    validate_report(doc)


def test_exit_codes(tmp_path, capsys):
    h = tmp_path / "h.json"
    main(["gen", "hypergraph", "--kind", "gnp", "--n", "9", "--k", "3", "--alpha", "0.5", "--seed", "2",
          "--out", str(h)])
    assert main(["verify", "inverse", "--in", str(h), "--budget", "1000"]) == 2
    assert "budget" in capsys.readouterr().err.lower()
    assert main(["frobnicate"]) == 2
    assert main(["verify", "mixing", "--in", str(h), "--alpha", "0.5", "--bogus"]) == 2
    assert main(["verify", "inverse", "--in", str(tmp_path / "missing.json")]) == 2
    assert main(["verify", "fw", "--in", str(h), "--budget", "10"]) == 2


def test_experiment_csv(tmp_path):
    out = tmp_path / "e.json"
    csv_path = tmp_path / "e.csv"
    assert main(["experiment", "random-rho", "--n", "7", "--k", "3", "--alpha", "0.5", "--seeds", "3",
                 "--no-estimate", "--csv", str(csv_path), "--out", str(out)]) == 0
    lines = csv_path.read_text().strip().splitlines()
    assert len(lines) == 4
    validate_report(_load(out))


def test_rerun_reproduces_payload(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    main(["gen", "hypergraph", "--kind", "gnp", "--n", "8", "--k", "3", "--alpha", "0.5", "--seed", "3",
          "--out", "h.json"])
    assert main(["verify", "mixing", "--in", "h.json", "--alpha", "0.5", "--starts", "8", "--out", "a.json"]) == 0
    for w in ("1", "8"):
        assert main(["rerun", "a.json", "--workers", w, "--out", f"b{w}.json"]) == 0
        assert _strip_runtime(_load(f"b{w}.json")) == _strip_runtime(_load("a.json"))
    write_object(gen_hypergraph("gnp", 8, 3, alpha=0.5, seed=4), "h.json")
    assert main(["rerun", "a.json", "--out", "c.json"]) == 2
