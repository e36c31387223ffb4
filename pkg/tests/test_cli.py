import json
import os

import pytest

from gwpairs.cli import SCHEMA, main

GRAPH = os.path.join(os.path.dirname(__file__), "..", "examples_cli", "two_vertex.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_verify_fundamental(capsys):
    code, out, err = run(capsys, "verify", "fundamental", "--max-k", "9")
    assert code == 0
    rep = json.loads(out)
    assert rep["schema"] == SCHEMA
    assert rep["status"] == "pass"
    assert len(rep["checks"]) == 10
    assert "pass" in err


def test_expand_example(capsys):
    code, out, _ = run(capsys, "expand", "--expr", "(1-q)/(1+q)", "--order", "3")
    assert code == 0
    series = json.loads(out)["result"]["series"]
    assert series["min_pow"] == -1
    assert json.loads(out)["result"]["text"].startswith("(i*(2))*u^-1")


def test_default_order_is_twelve(capsys):
    _, out, _ = run(capsys, "expand", "--expr", "q")
    assert json.loads(out)["inputs"]["order"] == 12


def test_example_suite_reports_k21(capsys):
    code, out, _ = run(capsys, "verify", "degree-one", "--order", "12")
    assert code == 0
    rep = json.loads(out)
    assert [c["status"] for c in rep["checks"]] == ["pass"] * 3
    assert "s1 + s2 + s3" in rep["result"]["k_2_1_text"].replace("-s1 - s2 - s3", "s1 + s2 + s3")


def test_output_is_byte_stable(capsys):
    _, a, _ = run(capsys, "verify", "charsum", "--max-n", "5")
    _, b, _ = run(capsys, "verify", "charsum", "--max-n", "5")
    assert a == b


def test_threads_do_not_change_output(capsys, monkeypatch):
    _, a, _ = run(capsys, "verify", "one-point", "--max", "4")
    monkeypatch.setenv("GWPAIRS_THREADS", "4")
    _, b, _ = run(capsys, "verify", "one-point", "--max", "4")
    assert a == b


def test_usage_errors(capsys):
    assert run(capsys, "bogus")[0] == 2
    assert run(capsys, "verify", "fundamental", "--nope")[0] == 2
    assert run(capsys, "cap", "oracle", "--alpha", "x")[0] == 2
    assert run(capsys, "k-check", "--input", "/nonexistent.json")[0] == 2


def test_k_matrix_round_trip(tmp_path, capsys):
    path = tmp_path / "k.json"
    assert run(capsys, "k-matrix", "--max-deg", "4", "--out", str(path))[0] == 0
    code, out, _ = run(capsys, "k-check", "--input", str(path))
    assert code == 0
    assert json.loads(out)["result"]["violations"] == []


def test_k_check_failure_exit_code(tmp_path, capsys):
    path = tmp_path / "k.json"
    run(capsys, "k-matrix", "--max-deg", "2", "--out", str(path))
    data = json.loads(path.read_text())
    # double K_(2),(2) = 1/(iu): the diagonal rule must fire
    entry = next(e for e in data["result"]["entries"] if e["alpha"] == "2" and e["alpha_hat"] == "2")
    entry["coeff"]["coeffs"][0]["num"][0][1]["im"] = "-2/1"
    path.write_text(json.dumps(data))
    code, out, _ = run(capsys, "k-check", "--input", str(path))
    assert code == 1
    rep = json.loads(out)
    assert rep["checks"][0]["witness"]


@pytest.mark.parametrize("kind,flag,value", [("oracle", "--alpha", "3,2"), ("one-point", "--gamma", "2,1,1"), ("pt-pure", "--gamma", "2,2")])
def test_cap(capsys, kind, flag, value):
    code, out, _ = run(capsys, "cap", kind, flag, value)
    assert code == 0
    assert json.loads(out)["status"] == "pass"


def test_tau_ktilde(capsys):
    code, out, _ = run(capsys, "tau", "ktilde", "--alpha", "2,1")
    assert code == 0
    assert [r["alpha_hat"] for r in json.loads(out)["result"]] == ["1"]


def test_schur_rank(capsys):
    code, out, _ = run(capsys, "schur-rank", "--d", "3", "--N", "2")
    assert code == 0
    assert json.loads(out)["result"]["vertex_pair_rank"] == 3


def test_assemble(capsys):
    code, out, _ = run(capsys, "assemble", "--graph", GRAPH, "--beta", "C=1", "--theory", "pt")
    assert code == 0
    assert json.loads(out)["result"]["text"] == "1"
    assert run(capsys, "assemble", "--graph", GRAPH, "--beta", "C=1", "--place", "a=2")[0] == 2


def test_timing_is_opt_in(capsys):
    _, out, _ = run(capsys, "verify", "vandermonde", "--max-d", "3")
    assert "timing" not in json.loads(out)
    _, out, _ = run(capsys, "verify", "vandermonde", "--max-d", "3", "--timing")
    assert "seconds" in json.loads(out)["timing"]
