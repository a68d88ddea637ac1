import json
import math

import pytest

from nterm.approx import CoefficientSequence, FunctionClassSpec, class_best_nterm_sp
from nterm.cli import main
from nterm.weights import WeightFunction


def test_shells_frozen_csv(capsys):
    assert main(["shells", "--d", "1", "--m-max", "3"]) == 0
    out = capsys.readouterr().out
    assert out == "m,nu,V\n0,1,1\n1,2,3\n2,2,5\n3,2,7\n"


def test_shells_json_mirror(tmp_path, capsys):
    jpath = tmp_path / "shells.json"
    assert main(["shells", "--d", "2", "--m-max", "4", "--r", "1",
                 "--json-out", str(jpath)]) == 0
    capsys.readouterr()
    doc = json.loads(jpath.read_text())
    assert doc["metadata"]["command"] == "shells"
    assert doc["metadata"]["m_max"] == 4
    assert doc["metadata"]["r"] == 1.0
    assert doc["metadata"]["d"] == 2
    assert doc["result"]["nu"] == [1, 4, 8, 12, 16]
    assert doc["result"]["V"] == [1, 5, 13, 25, 41]
    assert "M0" in doc["result"]["fit"]


def test_metadata_round_trips_every_flag(tmp_path, capsys):
    jpath = tmp_path / "h.json"
    argv = ["hfunc", "--psi", "power:s=2", "--n", "4", "--s", "0.5",
            "--r", "inf", "--d", "1", "--p-power", "2.0", "--tol", "1e-8",
            "--scan-budget", "50000", "--threads", "2", "--seed", "7",
            "--json-out", str(jpath)]
    assert main(argv) == 0
    capsys.readouterr()
    meta = json.loads(jpath.read_text())["metadata"]
    assert meta["psi"] == "power:s=2"
    assert meta["n"] == 4
    assert meta["s"] == 0.5
    assert meta["r"] == "inf"
    assert meta["p_power"] == 2.0
    assert meta["tol"] == 1e-8
    assert meta["scan_budget"] == 50000
    assert meta["threads"] == 2
    assert meta["seed"] == 7
    assert meta["budget"] is None


def test_parse_and_validation_exit_2(capsys):
    assert main(["en-class", "--q", "1", "--p", "1", "--n", "2"]) == 2
    assert "missing required flags" in capsys.readouterr().err
    assert main(["hfunc", "--psi", "bogus:weight", "--n", "2", "--s", "0.5"]) == 2
    capsys.readouterr()
    assert main(["no-such-command"]) == 2
    capsys.readouterr()
    assert main(["shells", "--m-max", "4", "--r", "-3"]) == 2
    capsys.readouterr()
    assert main(["shells", "--m-max", "0"]) == 2
    capsys.readouterr()


def test_greedy_malformed_input_exit_2(tmp_path, capsys):
    path = tmp_path / "seq.json"
    path.write_text(json.dumps({"entries": [3, -4, 1]}))
    assert main(["greedy", "--in", str(path), "--n", "0", "--p", "2"]) == 2
    assert "cannot read coefficient file" in capsys.readouterr().err


def test_compute_error_exit_1_json_record(capsys):
    # p < q with a divergent convergence condition
    code = main(["en-class", "--psi", "power:s=1", "--q", "1", "--p", "0.5", "--n", "2"])
    captured = capsys.readouterr()
    assert code == 1
    record = json.loads(captured.err.strip())
    assert record["error"]["type"] == "DivergentTailError"
    assert record["error"]["message"]

    # a generic quasi-norm order forces lattice enumeration, so the
    # point budget applies
    code = main(["shells", "--d", "2", "--r", "1.5", "--m-max", "200", "--budget", "100"])
    captured = capsys.readouterr()
    assert code == 1
    assert json.loads(captured.err.strip())["error"]["type"] == "BudgetExceededError"


def test_greedy_frozen(tmp_path, capsys):
    f = CoefficientSequence(d=1, entries={(0,): 3.0, (2,): -4.0})
    fpath = tmp_path / "f.json"
    fpath.write_text(f.to_json())
    jpath = tmp_path / "g.json"
    assert main(["greedy", "--in", str(fpath), "--n", "0,1,2", "--p", "2",
                 "--json-out", str(jpath)]) == 0
    out = capsys.readouterr().out
    assert out == "n,remainder\n0,5\n1,3\n2,0\n"
    doc = json.loads(jpath.read_text())
    assert doc["result"]["order"] == [[2], [0]]
    assert main(["greedy", "--in", str(tmp_path / "missing.json"), "--n", "1", "--p", "2"]) == 2
    capsys.readouterr()


def test_en_class_matches_library(capsys):
    assert main(["en-class", "--psi", "power:s=2", "--q", "1", "--p", "2",
                 "--n", "2,4"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0] == "n,en"
    psi = WeightFunction("power", s=2.0)
    spec = FunctionClassSpec(q=1.0, r=math.inf, psi=psi, d=1)
    for line, n in zip(lines[1:], (2, 4)):
        got = float(line.split(",")[1])
        want = class_best_nterm_sp(spec, n, 2.0, tol=1e-9, scan_budget=1_000_000).value
        assert got == pytest.approx(want, rel=1e-15)


def test_config_file_merge(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"psi": "power:s=2", "n": "4", "s": 0.25, "d": 1}))
    assert main(["hfunc", "--config", str(cfg), "--s", "0.5"]) == 0
    merged = json.loads(capsys.readouterr().out)
    assert merged["metadata"]["s"] == 0.5          # explicit flag wins
    assert merged["metadata"]["psi"] == "power:s=2"
    assert merged["metadata"]["n"] == 4

    assert main(["hfunc", "--psi", "power:s=2", "--n", "4", "--s", "0.5"]) == 0
    direct = json.loads(capsys.readouterr().out)
    assert merged["result"] == direct["result"]

    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert main(["hfunc", "--config", str(bad), "--psi", "power:s=2",
                 "--n", "4", "--s", "0.5"]) == 2
    capsys.readouterr()


def test_rates_rerun_byte_identical(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        assert main(["rates", "--quantity", "class_sp", "--psi", "power:s=2",
                     "--n-grid", "4,8,16", "--q", "1", "--p", "2",
                     "--out", str(path)]) == 0
        capsys.readouterr()
    assert paths[0].read_bytes() == paths[1].read_bytes()
    text = paths[0].read_text()
    assert text.startswith("n,computed,predicted,ratio\n")
    assert len(text.strip().split("\n")) == 4


def test_lemma51_seeded_rerun(tmp_path, capsys):
    argv = ["lemma51", "--n-grid", "8,16", "--p", "2,4", "--trials", "2",
            "--seed", "3"]
    outs = []
    for _ in range(2):
        assert main(argv) == 0
        outs.append(capsys.readouterr().out)
    assert outs[0] == outs[1]
    header, first = outs[0].split("\n")[:2]
    assert header == "n,p,trial,norm,ratio"
    assert first.startswith("8,2,0,")
    assert main(["lemma51", "--n-grid", "100", "--p", "2", "--cube-scale", "0.1"]) == 2
    capsys.readouterr()


def test_check_psi(capsys):
    assert main(["check-psi", "--psi", "power:s=2", "--s", "2", "--d", "1"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["class_b"]["in_class"] is True
    assert doc["result"]["decay"]["satisfied"] is True
    assert doc["result"]["convexity_evidence"] is True

    assert main(["check-psi", "--psi", "const", "--s", "2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["result"]["class_b"]["in_class"] is False
    assert doc["result"]["decay"]["satisfied"] is False
