import json
import subprocess
import sys

import pytest

from mram.cli import main


def cli(*args):
    return main(list(args))


def test_run_and_fmt(tmp_path, capsys):
    prog = tmp_path / "sq.masm"
    prog.write_text("load [2], #2\nmul [2],[2],[2]\n\nhalt ; done\n")
    assert cli("run", str(prog), "--cost", "both") == 0
    out = capsys.readouterr().out
    assert "executed: 3" in out and "unit_cost: 3" in out and "log_cost:" in out
    assert cli("fmt", str(prog)) == 0
    assert capsys.readouterr().out == "LOAD [2], #2\nMUL [2], [2], [2]\nHALT\n"


def test_run_input_and_trace(tmp_path, capsys):
    prog = tmp_path / "add.masm"
    prog.write_text("ADD [0], [2], [3]\nHALT\n")
    assert cli("run", str(prog), "--input", "4,5", "--trace") == 0
    out = capsys.readouterr().out
    assert "output: 9" in out
    assert out.splitlines()[0].split("\t")[:2] == ["0", "ADD"]


def test_run_fault_exit_code(tmp_path, capsys):
    prog = tmp_path / "bad.masm"
    prog.write_text("DIV [0], #1, #0\nHALT\n")
    assert cli("run", str(prog)) == 1
    prog.write_text("top: JUMP top\n")
    assert cli("run", str(prog), "--fuel", "10") == 1


def test_parse_error_is_usage_error(tmp_path, capsys):
    prog = tmp_path / "bad.masm"
    prog.write_text("ADD [0]\nBOGUS\n")
    assert cli("fmt", str(prog)) == 2
    err = capsys.readouterr().err
    assert "line 1" in err and "line 2" in err


def test_ndtm_commands(tmp_path, capsys):
    assert cli("ndtm", "validate", "parity") == 0
    assert capsys.readouterr().out.startswith("ok")
    assert cli("ndtm", "oracle", "parity", "--input", "111", "--space", "4", "--time", "4") == 0
    assert capsys.readouterr().out.startswith("accept")
    assert cli("ndtm", "simulate", "parity", "--input", "11", "--space", "3", "--time", "3") == 0
    assert capsys.readouterr().out.startswith("reject")
    masm, layout = tmp_path / "p.masm", tmp_path / "p.json"
    assert cli("ndtm", "compile", "guess_bit", "--space", "2", "--time", "2", "-o", str(masm), "--layout", str(layout)) == 0
    capsys.readouterr()
    assert json.loads(layout.read_text())["output"] == 0
    assert cli("run", str(masm), "--input", "0") == 0
    assert "output: 1" in capsys.readouterr().out
    assert cli("ndtm", "check", "guess_bit", "--space", "2", "--time", "2") == 0


def test_ndtm_spec_file(tmp_path, capsys):
    spec = tmp_path / "m.json"
    spec.write_text(json.dumps({
        "states": ["a", "b"], "tape_alphabet": ["_", "x"], "blank": "_", "input_alphabet": ["x"],
        "transitions": [["a", "x", "b", "x", "R"]], "start": "a", "accept": ["b"], "reject": [],
    }))
    assert cli("ndtm", "check", str(spec), "--input", "x", "--space", "2", "--time", "1") == 0
    spec.write_text(json.dumps({
        "states": ["a"], "tape_alphabet": ["_"], "blank": "_", "input_alphabet": [],
        "transitions": [], "start": "zzz", "accept": [], "reject": [],
    }))
    assert cli("ndtm", "validate", str(spec)) == 2


def test_sizing_refusal_exit_code(capsys):
    assert cli("ndtm", "compile", "parity", "--space", "8", "--bit-budget", "100") == 2


def test_sat_commands(tmp_path, capsys):
    cnf = tmp_path / "f.cnf"
    cnf.write_text("c example\np cnf 2 2\n1 -2 0\n2 0\n")
    assert cli("sat", "oracle", str(cnf)) == 0
    assert capsys.readouterr().out.startswith("SAT 1 2")
    machine = tmp_path / "m.json"
    assert cli("sat", "compile", str(cnf), "-o", str(machine), "--masm", str(tmp_path / "m.masm")) == 0
    assert json.loads(machine.read_text())["start"] == "g0"
    assert cli("ndtm", "validate", str(machine)) == 0
    assert cli("sat", "check", str(cnf)) == 0
    cnf.write_text("p cnf 1 1\n0\n")
    assert cli("sat", "oracle", str(cnf)) == 2


def test_sort_commands(capsys):
    assert cli("sort", "run", "--keys", "3,1,2,2", "--max-key", "3") == 0
    assert capsys.readouterr().out.splitlines()[0] == "1,2,2,3"
    assert cli("sort", "run", "--keys", "9", "--max-key", "3") == 1
    assert cli("sort", "emit", "--n", "2", "--max-key", "4") == 0
    assert "HALT" in capsys.readouterr().out


def test_bench_scaling(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert cli("bench", "scaling", "--problem", "sat", "--sizes", "1..3", "--seed", "7", "--report", str(out)) == 0
    assert len(out.read_text().splitlines()) == 4
    assert json.loads(out.with_suffix(".json").read_text())["config"]["seed"] == 7


def test_usage_error_exit_code():
    with pytest.raises(SystemExit) as err:
        main(["bench", "nope"])
    assert err.value.code == 2


def test_console_entry_point():
    res = subprocess.run([sys.executable, "-m", "mram.cli", "ndtm", "validate", "guess_bit"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout.startswith("ok")
