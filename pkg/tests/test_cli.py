import json
import subprocess
import sys

import pytest

from gnep import fileformat
from gnep.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


def test_verify_pd(capsys):
    code, rep, err = run(capsys, "verify", "corpus:prisoners_dilemma", "--point", '["D", "D"]')
    assert code == 0
    assert rep["result"]["report"]["verdict"] == "equilibrium"
    (v,) = [c for c in rep["result"]["certificates"] if c["kind"] == "V"]
    assert v["value"] == 0 and v["conclusion"] == "equilibrium-confirmed"
    assert "verdict: equilibrium" in err


def test_verify_not_equilibrium_is_exit_zero(capsys):
    code, rep, _ = run(capsys, "verify", "corpus:prisoners_dilemma", "--point", '["C", "C"]')
    assert code == 0 and rep["result"]["report"]["verdict"] == "not equilibrium"


def test_solve_enumerate_matching_pennies(capsys):
    code, rep, _ = run(capsys, "solve", "corpus:matching_pennies", "--algorithm", "enumerate")
    assert code == 0 and rep["result"]["solve"]["status"] == "none-exist"


def test_eval_pd(capsys):
    code, rep, _ = run(capsys, "eval", "corpus:prisoners_dilemma",
                       "--x", '["C", "C"]', "--y", '["D", "D"]')
    assert code == 0
    assert rep["result"]["psi"] == {"value": 4.0, "terms": [2.0, 2.0]}
    assert rep["result"]["V"]["value"] == 4.0
    assert rep["result"]["tilde_V"] is None


def test_eval_locked_pair(capsys):
    code, rep, _ = run(capsys, "eval", "corpus:locked_pair_game",
                       "--x", '["0", "0"]', "--y", '["1", "1"]')
    assert code == 0 and rep["result"]["tilde_V"]["value"] == 2.0


def test_probe_and_validate(capsys):
    code, rep, _ = run(capsys, "probe", "corpus:convex_bump", "--player", "1", "--point", "[0.5]")
    assert code == 0 and rep["result"]["probe"]["argmax_indices"] == [0, 256]
    code, rep, _ = run(capsys, "validate", "corpus:shared_link_game", "--probe-budget", "50")
    assert code == 0 and rep["result"]["validation"]["fixed_point_found"]


def test_digest_and_config(capsys):
    _, rep, _ = run(capsys, "validate", "corpus:prisoners_dilemma", "--tol-eq", "1e-3")
    assert rep["economy"]["players"] == 2
    assert rep["economy"]["constraint"] == "unconstrained"
    assert rep["config"]["tol_eq"] == 1e-3
    assert "timing_seconds" not in rep


def test_corpus_export_round_trip(capsys, tmp_path):
    path = tmp_path / "pd.json"
    code, rep, _ = run(capsys, "corpus", "prisoners_dilemma", "--export", str(path))
    assert code == 0 and rep["result"]["exported_to"] == str(path)
    fileformat.load(path)
    code, rep, _ = run(capsys, "solve", str(path), "--algorithm", "enumerate")
    assert rep["result"]["solve"]["equilibria"][0]["point"] == ["D", "D"]


def test_unknown_corpus_lists_names(capsys):
    code, rep, err = run(capsys, "corpus", "nope")
    assert code == 2 and rep is None
    assert "prisoners_dilemma" in err and "shared_link_game" in err


def test_schema_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n "players": 1,\n "spaces": [\n')
    code, rep, err = run(capsys, "validate", str(bad))
    assert code == 2 and "line" in err
    code, _, err = run(capsys, "validate", str(tmp_path / "missing.json"))
    assert code == 2


def test_bad_point_exit_code(capsys):
    code, _, err = run(capsys, "verify", "corpus:prisoners_dilemma", "--point", '["Q", "D"]')
    assert code == 2 and "error" in err


@pytest.mark.parametrize("argv", [
    ["solve", "corpus:shared_link_game", "--algorithm", "best-response", "--start", "[0.3, 0.1]"],
    ["probe", "corpus:concave_bump", "--player", "1", "--point", "[0.2]", "--seed", "7"],
    ["verify", "corpus:shared_link_game", "--point", "[0.3, 0.7]"],
])
def test_determinism(capsys, argv):
    _, first, _ = run(capsys, *argv)
    main(argv)
    again = capsys.readouterr().out
    assert json.loads(again) == first


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gnep", "corpus", "--list"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "matching_pennies" in json.loads(proc.stdout)["result"]["available"]
