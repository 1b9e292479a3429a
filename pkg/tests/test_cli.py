import json
from importlib import resources

import jsonschema
import pytest

from sparo.cli import EXIT_INFEASIBLE, EXIT_INPUT, EXIT_OK, main

SCHEMA = json.loads((resources.files("sparo") / "schema" / "report.schema.json").read_text())


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_compile_report_validates(capsys, tmp_path):
    trace = tmp_path / "trace.json"
    code, out, _ = run(capsys, "compile", "toffoli", "--trace", str(trace))
    assert code == EXIT_OK
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    assert rep["kind"] == "compile" and "seconds" in rep
    tr = json.loads(trace.read_text())
    assert tr["totals"] == rep["totals"] and "records" in tr["errors"]


def test_allocate_report_validates(capsys):
    code, out, _ = run(capsys, "allocate", "adder_n10", "--budget-pct", "30", "--omit-timing")
    assert code == EXIT_OK
    rep = json.loads(out)
    jsonschema.validate(rep, SCHEMA)
    alloc = rep["allocation"]
    assert alloc["footprint_tiles"] == alloc["minimal_tiles"] + alloc["budget_total"]
    assert alloc["budget_spent"] + alloc["budget_unspent"] == alloc["budget_total"]


def test_byte_identical_with_seed(capsys):
    args = ("compile", "adder_n10", "--omit-timing", "--seed", "7")
    a = run(capsys, *args)[1]
    b = run(capsys, *args)[1]
    assert a == b and "seconds" not in json.loads(a)


def test_env_seed_fallback(capsys, monkeypatch):
    monkeypatch.setenv("SPARO_SEED", "7")
    env = run(capsys, "compile", "adder_n10", "--omit-timing")[1]
    flag = run(capsys, "compile", "adder_n10", "--omit-timing", "--seed", "7")[1]
    assert env == flag
    monkeypatch.setenv("SPARO_SEED", "x")
    assert run(capsys, "compile", "tiny")[0] == EXIT_INPUT


def test_exit_codes(capsys, tmp_path):
    assert run(capsys, "compile", str(tmp_path / "missing.qc"))[0] == EXIT_INPUT
    bad = tmp_path / "bad.qc"
    bad.write_text("qubits 2\nfoo 0\n")
    code, _, err = run(capsys, "compile", str(bad))
    assert code == EXIT_INPUT and "error" in err
    assert run(capsys, "compile", "tiny", "--factories", "9")[0] == EXIT_INFEASIBLE
    assert run(capsys, "layout", "--qubits", "4", "--factories", "5")[0] == EXIT_INFEASIBLE
    assert run(capsys, "allocate", "tiny", "--budget-tiles", "-3")[0] == EXIT_INPUT


def test_transpile_and_compile_program_json(capsys, tmp_path):
    prog = tmp_path / "p.json"
    assert run(capsys, "transpile", "toffoli", "--out", str(prog))[0] == EXIT_OK
    code, out, _ = run(capsys, "compile", str(prog), "--omit-timing")
    assert code == EXIT_OK
    assert json.loads(out)["stats"]["t_count"] == 7


def test_layout_emit(capsys):
    code, out, _ = run(capsys, "layout", "--qubits", "4")
    assert code == EXIT_OK
    assert json.loads(out)["totals"]["total"] == 24


def test_sweep_outputs(capsys, tmp_path):
    csv_path, mat = tmp_path / "s.csv", tmp_path / "s.dat"
    code = main(["sweep", "adder_n10", "--max-extra", "0.2", "--step", "0.1",
                 "--out", str(csv_path), "--matrix", str(mat)])
    assert code == EXIT_OK
    rows = csv_path.read_text().splitlines()
    assert rows[0] == "extra_factory_pct,extra_routing_pct,relative_error"
    assert rows[1] == "0,0,1.0"
    assert len(rows) == 10
    assert len(mat.read_text().splitlines()) == 5
    assert run(capsys, "sweep", "tiny", "--step", "0")[0] == EXIT_INPUT


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "toffoli", "--shots", "4000", "--seed", "1")
    assert code == EXIT_OK and "PASS" in out
