import csv
import io
import json

import pytest

from quasiqec.cli import COLUMNS, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows_of(text):
    lines = text.splitlines()
    assert lines[0] == "# schema: 1"
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_recover_reference_value(capsys):
    code, out, _ = run(capsys, "recover", "--family", "holographic", "-d", "2", "-N", "10", "-t", "1")
    assert code == 0
    (row,) = rows_of(out)
    assert abs(float(row["value"]) - 0.01875) / 0.01875 < 0.05
    assert float(row["analytic"]) == 0.01875


def test_algebra_transfer_eigenvalues(capsys):
    code, out, _ = run(capsys, "algebra", "-d", "3")
    assert code == 0
    vals = {r["quantity"]: float(r["value"]) for r in rows_of(out)}
    assert abs(vals["mu0"] - 8 / 9) < 1e-12 and abs(vals["mu1"] + 1 / 9) < 1e-12


def test_threshold_success_probability(capsys):
    code, out, _ = run(capsys, "threshold", "-N", "3", "-t", "1", "-p", "0.1")
    assert code == 0
    vals = {r["quantity"]: float(r["value"]) for r in rows_of(out)}
    assert abs(vals["p_success"] - 0.972) < 1e-12


def test_json_output_and_header(capsys):
    code, out, _ = run(capsys, "gatecell", "--format", "json", "--seed", "3")
    doc = json.loads(out)
    assert code == 0 and doc["schema"] == 1 and doc["passed"]
    assert set(doc["rows"][0]) == set(COLUMNS)


def test_output_is_deterministic(capsys, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "threshold", "-N", "20", "-t", "2", "-p", "0.05,0.1", "--seed", "1",
                   "--samples", "2000", "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    row = [r for r in rows_of(a.read_text()) if r["quantity"] == "p_success_mc"][0]
    assert row["seed"] == "1" and row["samples"] == "2000"


def test_config_file_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"d": 3, "N": 12}))
    _, out, _ = run(capsys, "algebra", "--config", str(cfg), "-d", "2")
    rows = rows_of(out)
    assert {r["d"] for r in rows} == {"2"}
    assert any(r["N"] == "12" for r in rows)


def test_unknown_config_key_is_usage_error(capsys, tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"colour": 1}))
    code, _, err = run(capsys, "algebra", "--config", str(cfg))
    assert code == 2 and "colour" in json.loads(err)["error"]


def test_bad_arguments_exit_two(capsys):
    assert run(capsys, "teleport")[0] == 2
    assert run(capsys, "recover", "-N", "4", "-t", "9")[0] == 2
    assert run(capsys, "recover", "-N", "8", "--errors", "bond:n=2;bond:n=2")[0] == 2
    assert run(capsys, "code", "--family", "bulk", "-d", "2")[0] == 2


def test_tolerance_failure_exits_one(capsys):
    # d = 3, t = 3 at N = 20 misses the 10% band of the weight-t estimate
    code, out, _ = run(capsys, "recover", "-d", "3", "-N", "20", "-t", "3")
    assert code == 1
    assert rows_of(out)[0]["ok"] == "False"


def test_recover_fixed_errors(capsys):
    code, out, _ = run(capsys, "recover", "-d", "2", "-N", "8", "--errors", "bond:n=2;bond:n=4")
    assert code == 0
    vals = {r["quantity"]: float(r["value"]) for r in rows_of(out)}
    assert vals["recovered_trace"] > 1


def test_classify_reports_weak_exponential(capsys):
    code, out, _ = run(capsys, "classify", "--family", "edge", "-d", "2")
    assert code == 0
    assert any(r["quantity"] == "class:weak:exp_in_n" for r in rows_of(out))


def test_code_runs_exact_diagonalisation(capsys):
    code, out, _ = run(capsys, "code", "-d", "3", "-N", "4", "--family", "bulk")
    assert code == 0
    vals = {r["quantity"]: float(r["value"]) for r in rows_of(out)}
    assert vals["ed_degeneracy"] == 2
