"""Command line behaviour and exit codes."""
from __future__ import annotations

import io
import json
import subprocess
import sys

import pytest

from ginzburg_ainf.cli import EXIT_FAIL, EXIT_INPUT, EXIT_OK, main, thread_cap


def run(argv, stdin_text=""):
    out, err = io.StringIO(), io.StringIO()
    code = main(argv, stdin=io.StringIO(stdin_text), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture(autouse=True)
def _no_thread_env(monkeypatch):
    monkeypatch.delenv("GINZBURG_THREADS", raising=False)


def test_minimal_model_a2(quiver_dir):
    code, out, _ = run(["minimal-model", "--quiver", str(quiver_dir / "a2.q"), "--wmax", "3", "--nmax", "4"])
    assert code == EXIT_OK
    data = json.loads(out)
    assert data["violations"] == 0 and data["gauge"]["solved"]
    assert data["nonzero_entries"]["4"] == 0


def test_minimal_model_from_stdin(quiver_dir):
    text = (quiver_dir / "a2.q").read_text()
    code, out, _ = run(["minimal-model", "--wmax", "2", "--nmax", "3"], text)
    assert code == EXIT_OK and json.loads(out)["max_weight"] == 2


def test_minimal_model_kronecker_is_formal(quiver_dir):
    code, out, _ = run(["minimal-model", "--quiver", str(quiver_dir / "kronecker.q"), "--wmax", "3", "--nmax", "5"])
    data = json.loads(out)
    assert code == EXIT_OK and data["gauge"] == {"kind": "none"}
    assert data["nonzero_entries"]["2"] > 0
    assert all(data["nonzero_entries"][str(n)] == 0 for n in range(3, 6))


def test_check_recomputes(quiver_dir):
    code, out, _ = run(["check", "--quiver", str(quiver_dir / "a3.q"), "--wmax", "3", "--nmax", "5"])
    data = json.loads(out)
    assert code == EXIT_OK and data["violations"] == 0


def test_check_stored_table(tmp_path, quiver_dir):
    path = tmp_path / "t.json"
    code, _, _ = run(["minimal-model", "--quiver", str(quiver_dir / "a2.q"), "--wmax", "3", "--nmax", "4",
                      "--out", str(path)])
    assert code == EXIT_OK
    code, out, _ = run(["check", "--table", str(path)])
    assert code == EXIT_OK and json.loads(out)["violations"] == 0
    # corrupt one product
    data = json.loads(path.read_text())
    for op in data["table"]["operations"]:
        if op["n"] == 2 and op["inputs"] == ["a", "a*.t2"]:
            op["output"][0]["coeff"] = "2"
    path.write_text(json.dumps(data))
    code, out, _ = run(["check", "--table", str(path)])
    assert code == EXIT_FAIL and json.loads(out)["violations"] > 0


def test_check_rejects_garbage_table(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert run(["check", "--table", str(path)])[0] == EXIT_INPUT
    path.write_text(json.dumps({"classes": []}))
    assert run(["check", "--table", str(path)])[0] == EXIT_INPUT


@pytest.mark.parametrize("mode", ["thm42", "thm55"])
def test_compare_a3(quiver_dir, mode):
    code, out, _ = run(["compare", "--quiver", str(quiver_dir / "a3.q"), "--mode", mode])
    data = json.loads(out)
    assert code == EXIT_OK and data["mismatches"] == [] and data["blocks_checked"] > 0
    assert {"hilbert_a", "hilbert_b"} <= set(data)


def test_compare_twisted_mode_needs_dynkin(quiver_dir):
    code, _, err = run(["compare", "--quiver", str(quiver_dir / "kronecker.q"), "--mode", "thm55"])
    assert code == EXIT_INPUT and "Dynkin" in err


def test_ar_quiver(quiver_dir):
    code, out, _ = run(["ar-quiver", "--quiver", str(quiver_dir / "a3.q")])
    data = json.loads(out)
    assert code == EXIT_OK and data["unshifted"] == 6
    assert data["nakayama"] == {"1": "3", "2": "2", "3": "1"}
    code, out, _ = run(["ar-quiver", "--quiver", str(quiver_dir / "kronecker.q"), "--format", "dot"])
    assert code == EXIT_OK and out.startswith("digraph")


def test_ar_quiver_bad_depth(quiver_dir):
    code, _, err = run(["ar-quiver", "--quiver", str(quiver_dir / "a2.q"), "--depth", "0"])
    assert code == EXIT_INPUT and err.startswith("error:")


@pytest.mark.parametrize("of", ["homology", "preprojective", "translation", "twisted"])
def test_hilbert(quiver_dir, of):
    code, out, _ = run(["hilbert", "--quiver", str(quiver_dir / "a2.q"), "--of", of, "--wmax", "3"])
    assert code == EXIT_OK and json.loads(out)["of"] == of


def test_hilbert_homology_equals_translation(quiver_dir):
    outs = [json.loads(run(["hilbert", "--quiver", str(quiver_dir / "d4.q"), "--of", of])[1]) for of in
            ("homology", "translation")]
    outs[0].pop("of"), outs[1].pop("of")
    assert outs[0] == outs[1]


def test_dump_and_text_format(quiver_dir):
    code, out, _ = run(["dump", "--quiver", str(quiver_dir / "a2.q"), "--wmax", "2"])
    assert code == EXIT_OK and json.loads(out)["subcommand"] == "dump"
    code, out, _ = run(["dump", "--quiver", str(quiver_dir / "a2.q"), "--wmax", "2", "--format", "text"])
    assert code == EXIT_OK and out and not out.startswith("{")


def test_input_errors(tmp_path, quiver_dir):
    code, _, err = run(["check", "--quiver", str(quiver_dir / "loop.q")])
    assert code == EXIT_INPUT and "not acyclic" in err
    empty = tmp_path / "empty.q"
    empty.write_text("")
    assert run(["check", "--quiver", str(empty)])[0] == EXIT_INPUT
    assert run(["check", "--quiver", str(tmp_path / "missing.q")])[0] == EXIT_INPUT
    assert run(["check", "--quiver", str(quiver_dir / "a2.q"), "--wmax", "0"])[0] == EXIT_INPUT
    assert run(["check", "--quiver", str(quiver_dir / "a2.q"), "--nmax", "1"])[0] == EXIT_INPUT
    assert run(["no-such-command"])[0] == EXIT_INPUT
    assert run(["check"], "vertex 1\narrow a: 1 -> 9\n")[0] == EXIT_INPUT


@pytest.mark.parametrize("value", ["0", "-3", "many"])
def test_bad_thread_env(monkeypatch, quiver_dir, value):
    monkeypatch.setenv("GINZBURG_THREADS", value)
    code, _, err = run(["ar-quiver", "--quiver", str(quiver_dir / "a2.q")])
    assert code == EXIT_INPUT and "GINZBURG_THREADS" in err


def test_thread_cap_values():
    assert thread_cap({"GINZBURG_THREADS": "3"}) == 3
    assert thread_cap({}) >= 1


def test_deterministic_output(quiver_dir):
    argv = ["minimal-model", "--quiver", str(quiver_dir / "a3.q"), "--wmax", "3", "--nmax", "4"]
    assert run(argv)[1] == run(argv)[1]


def test_console_entry_point(quiver_dir):
    proc = subprocess.run([sys.executable, "-m", "ginzburg_ainf.cli", "ar-quiver", "--quiver",
                           str(quiver_dir / "a2.q")], capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["unshifted"] == 3
