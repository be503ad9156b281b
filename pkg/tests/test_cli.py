import json

import pytest

from coalsynth import __version__
from coalsynth.cli import main
from coalsynth.game import load_problem

from conftest import DATA


def call(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def bw_file(tmp_path, capsys):
    path = tmp_path / "bw.txt"
    assert call(capsys, "blocksworld", "-o", path)[0] == 0
    return path


def test_solve_prints_summary(capsys):
    code, out, _ = call(capsys, "solve", DATA / "helpful.txt")
    assert code == 0
    assert out.startswith(f"# coalsynth {__version__} input=")
    assert "l* = 0" in out


def test_solve_bound(capsys):
    code, out, _ = call(capsys, "solve", DATA / "unhelpful.txt", "--bound", 0)
    assert code == 0 and "no admissible strategy" in out
    code, out, _ = call(capsys, "solve", DATA / "unhelpful.txt", "--bound", 1)
    assert "success" in out
    assert call(capsys, "solve", DATA / "unhelpful.txt", "--bound", 9)[0] == 1


def test_solve_writes_files_and_simulates(tmp_path, capsys):
    out_dir = tmp_path / "out"
    assert call(capsys, "solve", DATA / "follower.txt", "-o", out_dir)[0] == 0
    for name in ("values.txt", "solution.txt", "solution.json"):
        assert (out_dir / name).exists()
    code, out, _ = call(capsys, "simulate", DATA / "follower.txt", out_dir / "solution.json",
                        "--format", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# coalsynth") and lines[1].startswith("step,game_state")
    assert len(lines) == 4


def test_outputs_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    call(capsys, "solve", DATA / "follower.txt", "-o", a)
    call(capsys, "solve", DATA / "follower.txt", "-o", b)
    for name in ("values.txt", "solution.txt", "solution.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_errors(tmp_path, capsys):
    out_dir = tmp_path / "out"
    call(capsys, "solve", DATA / "helpful.txt", "-o", out_dir)
    sol = out_dir / "solution.json"
    assert call(capsys, "simulate", DATA / "helpful.txt", sol, "--horizon", 0)[0] == 1
    code, _, err = call(capsys, "simulate", DATA / "unhelpful.txt", sol)
    assert code == 1 and "solution was computed for problem" in err


def test_verify_pass_and_fail(capsys):
    code, out, _ = call(capsys, "verify", DATA / "control.txt")
    assert code == 0
    assert "# oracle checks enumerate positional strategies only" in out
    assert out.count(", pass, ") == 6
    code, out, _ = call(capsys, "verify", DATA / "control.txt", "--corrupt-values")
    assert code == 3
    assert "control, values-oracle, fail" in out


def test_verify_budget_exceeded(bw_file, capsys):
    code, _, err = call(capsys, "verify", bw_file, "--budget", 1000)
    assert code == 2 and "budget" in err


def test_blocksworld_formats(bw_file, capsys):
    assert len(load_problem(bw_file.read_text()).game.states) == 666
    code, out, _ = call(capsys, "blocksworld", "--format", "json")
    assert code == 0
    assert len(json.loads(out)["states"]) == 666


def test_export_graph(capsys):
    code, out, _ = call(capsys, "export-graph", DATA / "helpful.txt")
    assert code == 0
    assert out.startswith("// coalsynth") and "digraph" in out


def test_random_is_seeded(capsys):
    a = call(capsys, "random", "--seed", 5)[1]
    b = call(capsys, "random", "--seed", 5)[1]
    assert a == b
    load_problem(a)
    assert call(capsys, "random", "--seed", 5, "--dense", "--owned")[0] == 0


def test_input_errors(tmp_path, capsys):
    assert call(capsys, "solve", tmp_path / "nope.txt")[0] == 1
    assert call(capsys, "solve", DATA / "missing.txt")[0] == 1
    assert call(capsys, "frobnicate")[0] == 1
    assert call(capsys)[0] == 1


def test_state_budget(capsys):
    assert call(capsys, "solve", DATA / "helpful.txt", "--state-budget", 1)[0] == 2
