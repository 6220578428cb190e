import json
import shutil

import pytest

from emu.cli import run, solve_report_from_json


@pytest.fixture
def g1_path(fixtures_dir, tmp_path):
    dst = tmp_path / "g1.game"
    shutil.copy(fixtures_dir / "g1.game", dst)
    return str(dst)


@pytest.fixture
def prio_path(fixtures_dir):
    return str(fixtures_dir / "g1_buchi.prio")


def test_solve_state_wins(g1_path, capsys):
    code = run(["solve", g1_path, "--builtin", "buchi", "--param", "J=y",
                "--bound", "2", "--state", "x & y"])
    out = capsys.readouterr().out
    assert code == 0
    assert "min credit 0" in out
    assert "system wins" in out


def test_solve_bound_zero_loses(g1_path, capsys):
    code = run(["solve", g1_path, "--builtin", "buchi", "--param", "J=y",
                "--bound", "0", "--state", "x & y"])
    out = capsys.readouterr().out
    assert code == 1
    assert "min credit inf" in out


def test_solve_unbounded(g1_path, capsys):
    code = run(["solve", g1_path, "--builtin", "buchi", "--param", "J=y",
                "--bound", "inf"])
    out = capsys.readouterr().out
    assert code == 0
    assert "effective bound: 38" in out


def test_solve_uses_game_formula_by_default(g1_path, capsys):
    code = run(["solve", g1_path, "--bound", "2"])
    assert code == 0
    assert "W_sys: 4 states" in capsys.readouterr().out


def test_solve_json_round_trip(g1_path, capsys):
    code = run(["solve", g1_path, "--builtin", "buchi", "--param", "J=y",
                "--bound", "2", "--format", "json"])
    assert code == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["schema"] == 1
    bound, credits, w_sys, w_env = solve_report_from_json(doc)
    assert bound == 2
    assert credits.values.tolist() == [0, 0, 0, 0]
    assert w_sys.all() and not w_env.any()


def test_bound_command(g1_path, prio_path, capsys):
    assert run(["bound", g1_path, "--builtin", "safety"]) == 0
    assert "bound: 118" in capsys.readouterr().out
    assert run(["bound", g1_path, "--builtin", "buchi", "--param", "J=y"]) == 0
    assert "bound: 38" in capsys.readouterr().out
    assert run(["bound", g1_path, "--priorities", prio_path]) == 0
    out = capsys.readouterr().out
    assert "bound: 38" in out and "variant: parity" in out


def test_region_command(g1_path, capsys):
    assert run(["region", g1_path, "--builtin", "buchi", "--param", "J=y",
                "--bound", "2"]) == 0
    out = capsys.readouterr().out
    assert "W_sys (4 states):" in out
    assert "partition: 4 + 0 = 4" in out
    assert run(["region", g1_path, "--builtin", "buchi", "--param", "J=y",
                "--bound", "0"]) == 0
    assert "W_env (4 states):" in capsys.readouterr().out


def test_usage_errors(g1_path, tmp_path, capsys):
    assert run(["solve", str(tmp_path / "missing.game"), "--bound", "1"]) == 2
    assert run(["solve", g1_path, "--bound", "-3"]) == 2
    assert run(["solve", g1_path, "--bound", "1", "--formula", "<>X"]) == 2
    assert run(["solve", g1_path, "--bound", "1", "--formula", "nu X . <>X",
                "--builtin", "safety"]) == 2
    assert run(["solve", g1_path, "--bound", "1", "--state", "x & !x"]) == 2
    capsys.readouterr()


def test_check_clean(tmp_path, capsys):
    code = run(["check", "--seed", "7", "--cases", "12", "--max-vars", "3",
                "--dump-dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "checked 12 cases, 0 mismatches" in out
    assert list(tmp_path.iterdir()) == []


def test_check_transcript_deterministic(tmp_path, capsys):
    args = ["check", "--seed", "11", "--cases", "8", "--max-vars", "3",
            "--dump-dir", str(tmp_path)]
    run(args)
    first = capsys.readouterr().out
    run(args)
    second = capsys.readouterr().out
    assert first == second


def test_check_mutation_detected(tmp_path, capsys):
    code = run(["check", "--seed", "7", "--cases", "5", "--max-vars", "3",
                "--dump-dir", str(tmp_path), "--mutate"])
    out = capsys.readouterr().out
    assert code == 3
    assert "MISMATCH" in out
    games = list(tmp_path.glob("counterexample-*.game"))
    reports = list(tmp_path.glob("counterexample-*.json"))
    assert len(games) == 1 and len(reports) == 1
    # the dumped game file loads and reproduces the case
    from emu import load_game

    load_game(games[0])
    meta = json.loads(reports[0].read_text())
    assert meta["seed"] == 7 and meta["oracle"] == "reduction"


def test_check_parity_oracle(tmp_path, capsys):
    code = run(["check", "--oracle", "parity", "--seed", "3", "--cases", "6",
                "--max-vars", "3", "--dump-dir", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0
    assert "checked 6 cases, 0 mismatches" in out


def test_check_parity_mutation(tmp_path, capsys):
    code = run(["check", "--oracle", "parity", "--seed", "3", "--cases", "4",
                "--max-vars", "3", "--dump-dir", str(tmp_path), "--mutate"])
    assert code == 3
    capsys.readouterr()
    # the dumped game keeps its priority annotation and reloads
    from emu import load_game

    (game_file,) = tmp_path.glob("counterexample-*.game")
    assert load_game(game_file).priorities is not None


def test_formula_file_source(g1_path, tmp_path, capsys):
    p = tmp_path / "formula.txt"
    p.write_text("nu X . <>X\n")
    code = run(["solve", g1_path, "--formula-file", str(p), "--bound", "3"])
    assert code == 0
    assert "W_sys: 4 states" in capsys.readouterr().out


def test_bound_and_region_json(g1_path, capsys):
    assert run(["bound", g1_path, "--builtin", "safety",
                "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["bound"] == 118 and doc["variant"] == "general"
    assert run(["region", g1_path, "--builtin", "buchi", "--param", "J=y",
                "--bound", "0", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["w_sys"] == [] and len(doc["w_env"]) == 4
