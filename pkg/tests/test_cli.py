import json
import subprocess
import sys

import pytest

from crgap.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def whitney_file(tmp_path, capsys):
    code, out, _ = run(capsys, "family", "--kind", "whitney", "--n", "2")
    assert code == 0
    path = tmp_path / "whitney.json"
    path.write_text(out)
    return path


def test_family_and_verify(capsys, whitney_file):
    code, doc = run_json(capsys, "verify-proper", str(whitney_file), "--full")
    assert code == 0 and doc["proper"] and doc["quotient"] == "1 + z0 z0~" and doc["linearly_full"]


def test_generalized_mu1_is_linear(capsys):
    _, a = run_json(capsys, "family", "--kind", "generalized", "--mu", "1", "--n", "4")
    _, b = run_json(capsys, "family", "--kind", "linear", "--n", "4")
    assert a == b


def test_symbolic_family_verifies(capsys, tmp_path):
    _, doc = run_json(capsys, "family", "--kind", "dangelo_c", "--n", "3")
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc))
    code, res = run_json(capsys, "verify-proper", str(path), "--full")
    assert code == 0 and res["proper"] and res["linearly_full"] is None


def test_not_proper_exit_code(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n": 1, "N": 1, "components": ["2 z0", "z1"]}))
    code, doc = run_json(capsys, "verify-proper", str(path))
    assert code == 1 and doc["proper"] is False


def test_input_errors(capsys, tmp_path):
    code, out, err = run(capsys, "verify-proper", str(tmp_path / "missing.json"))
    assert code == 2 and "error" in json.loads(out) and err
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "verify-proper", str(bad))[0] == 2
    assert run(capsys, "family", "--kind", "whitney", "--n", "0")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


def test_iwatani(capsys, tmp_path):
    path = tmp_path / "t.json"
    path.write_text(json.dumps({"n": 3, "m": 3, "entries": [
        {"alpha": 1, "i": 1, "j": 3, "value": "1"}, {"alpha": 2, "i": 2, "j": 3, "value": "1"},
        {"alpha": 3, "i": 3, "j": 3, "value": "2"}]}))
    code, doc = run_json(capsys, "iwatani", str(path))
    assert code == 0 and doc["k"] == 1 and doc["bound"] == "3" and doc["bound_ok"] and doc["lambda_sq"] == "1"
    path.write_text(json.dumps({"n": 2, "m": 1, "entries": [{"alpha": 1, "i": 1, "j": 1, "value": "1"}]}))
    code, doc = run_json(capsys, "iwatani", str(path))
    assert code == 1 and doc == {"flat": False, "n": 2, "m": 1}


def test_iwatani_zero_tensor(capsys, tmp_path):
    path = tmp_path / "z.json"
    path.write_text(json.dumps({"n": 2, "m": 2, "entries": []}))
    code, doc = run_json(capsys, "iwatani", str(path))
    assert code == 0 and doc["k"] == 0


def test_sff_command(capsys, whitney_file):
    code, doc = run_json(capsys, "sff", str(whitney_file), "--seed", "3")
    assert code == 0 and doc["rank"] == 1 and doc["n"] == 2
    code, doc = run_json(capsys, "sff", str(whitney_file), "--point", "0,3/5,4/5i")
    assert code == 0 and doc["rank"] == 1
    assert run(capsys, "sff", str(whitney_file), "--point", "1,1,0")[0] == 2


def test_eds_commands(capsys):
    code, doc = run_json(capsys, "eds", "check", "scenario:heisenberg.eds")
    assert code == 0 and doc["all_zero"]
    code, doc = run_json(capsys, "eds", "check", "scenario:bad-system.eds")
    assert code == 1 and doc["nonzero"]
    code, doc = run_json(capsys, "eds", "builtin", "--scenario", "su", "--N", "2")
    assert code == 0 and doc["system"]
    code, doc = run_json(capsys, "eds", "builtin", "--scenario", "rank1", "--n", "4", "--r", "1", "--sabotage", "h_an")
    assert code == 1
    assert run(capsys, "eds", "builtin", "--scenario", "rank1", "--n", "3", "--r", "1")[0] == 2
    assert run(capsys, "eds", "builtin", "--scenario", "su")[0] == 2
    assert run(capsys, "eds", "check", "scenario:nope.eds")[0] == 2


def test_parse_error_position_in_json(capsys, tmp_path):
    path = tmp_path / "bad.eds"
    path.write_text("system x\nform theta real\nrule d theta = zeta^theta\n")
    code, doc = run_json(capsys, "eds", "check", str(path))
    assert code == 2 and doc["line"] == 3 and doc["col"] == 16


def test_human_format_both_positions(capsys):
    code, a, _ = run(capsys, "--format", "human", "eds", "check", "scenario:heisenberg.eds")
    code2, b, _ = run(capsys, "eds", "check", "scenario:heisenberg.eds", "--format", "human")
    assert code == code2 == 0 and a == b and "all_zero: True" in a


def test_output_is_deterministic(capsys):
    outs = {run(capsys, "eds", "builtin", "--scenario", "rank1", "--n", "4", "--r", "1", "--sabotage", "u0")[1]
            for _ in range(3)}
    assert len(outs) == 1


def test_pipe_between_processes():
    exe = [sys.executable, "-m", "crgap"]
    emitted = subprocess.run(exe + ["eds", "builtin", "--scenario", "su", "--N", "2", "--emit"],
                             capture_output=True, text=True, check=True).stdout
    checked = subprocess.run(exe + ["eds", "check", "-"], input=emitted, capture_output=True, text=True)
    assert checked.returncode == 0 and json.loads(checked.stdout)["all_zero"]
    fam = subprocess.run(exe + ["family", "--kind", "whitney", "--n", "3"], capture_output=True, text=True).stdout
    ver = subprocess.run(exe + ["verify-proper", "-"], input=fam, capture_output=True, text=True)
    assert ver.returncode == 0 and json.loads(ver.stdout)["quotient"] == "1 + z0 z0~"
