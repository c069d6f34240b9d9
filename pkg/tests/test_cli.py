from __future__ import annotations

import io
import subprocess
import sys

import pytest

from grw import fixtures as fx
from grw.cli import main
from grw.textio import parse_graph


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def data(name: str) -> str:
    return str(fx.data_path(name))


def test_match():
    code, out, _ = run("match", "-p", data("matching.grs"), "-g", data("g0.gr"))
    assert code == 0
    assert out.splitlines() == ["P0: b0=g0 b1=g1", "P0: b0=g2 b1=g1", "P1: b0=g0 b1=g1"]


def test_match_empty_is_not_an_error():
    code, out, _ = run("match", "-p", data("matching.grs"), "-g", data("g0.gr"), "--rule", "P2")
    assert (code, out) == (0, "")


def test_terminate_reach_loops():
    code, out, _ = run("terminate", "-r", data("q1q2.grs"), "-g", data("g1.gr"), "--mode", "reach")
    assert code == 1
    lines = out.splitlines()
    assert lines[0].startswith("Loops: cycle of length 2")
    # the cycle starts and ends at G1
    assert lines[1].split()[0] == lines[-1].split()[0]
    assert "Q1: 0=1 1=2" in out and "Q2: 3=1 4=2 5=0" in out


def test_terminate_reach_terminates():
    code, out, _ = run("terminate", "-r", data("clique.grs"), "-g", data("c2.gr"))
    assert (code, out) == (0, "Terminates: height 4, 16 states\n")


def test_terminate_limit_exit_code():
    code, out, _ = run("terminate", "-r", data("clique.grs"), "-g", data("c3.gr"), "--limit", "5")
    assert code == 3 and out.startswith("LimitExceeded")


def test_height():
    assert run("height", "-r", data("clique.grs"), "-g", data("c3.gr")) == (0, "9\n", "")
    code, _, err = run("height", "-r", data("q1q2.grs"), "-g", data("g1.gr"))
    assert code == 1 and "not terminating" in err


def test_terminate_weights_and_lex():
    code, out, _ = run(
        "terminate", "-r", data("q1q2.grs"), "--mode", "weights", "--weights", data("counter.weights")
    )
    assert code == 1 and out.splitlines()[-1] == "Incompatible"
    assert out.startswith("Q1: incompatible (2c) weight 2 -> 1")
    code, out, _ = run("terminate", "-r", data("antecedent.grs"), "--mode", "lex", "--weights", data("antecedent.weights"))
    assert code == 0 and out.splitlines()[-1] == "Compatible"
    assert "Stop: compatible (lex-2a)" in out
    code, _, _ = run("terminate", "-r", data("clique.grs"), "--mode", "weights", "--weights", data("clique.weights"))
    assert code == 0


def test_terminate_usage_errors():
    assert run("terminate", "-r", data("clique.grs"), "--mode", "weights")[0] == 2
    assert run("terminate", "-r", data("clique.grs"))[0] == 2
    code, _, err = run("terminate", "-r", data("clique.grs"), "--mode", "lex", "--weights", data("counter.weights"))
    assert code == 2 and "outside the alphabets" in err


def test_synthesize():
    assert run("synthesize", "-r", data("clique.grs")) == (0, "edge E 1\n", "")
    assert run("synthesize", "-r", data("q1q2.grs"))[:2] == (1, "NO-WEIGHT\n")


def test_normalize_and_trace():
    code, out, err = run("normalize", "-r", data("clique.grs"), "-g", data("c2.gr"), "--trace")
    assert code == 0
    assert out == "node 0 e\nnode 1 e\n"
    trace = [line for line in err.splitlines() if not line.startswith("normal form")]
    assert len(trace) == 4
    rule, matching, digest = trace[0].split(", ")
    assert rule in ("DelEdge", "DelLoop") and "=" in matching and len(digest) == 16
    code, _, err = run("normalize", "-r", data("q1q2.grs"), "-g", data("g1.gr"), "--fuel", "5")
    assert code == 1 and "fuel exhausted after 5 steps" in err


def test_rewrite_lists_every_step():
    code, out, _ = run("rewrite", "-r", data("q1q2.grs"), "-g", data("g1.gr"))
    assert code == 0
    assert out.startswith("# Q1: 0=1 1=2\n")
    alph = fx.grs("q1q2.grs").alphabets
    assert parse_graph(out.split("\n", 1)[1], alph) == fx.graph("g2.gr", alph)


def test_pipeline_run():
    code, out, err = run("pipeline", "run", "-P", data("antecedent.pipeline"), "-g", data("chain3.gr"))
    assert code == 0
    assert "edge p A y" in out.splitlines() and " E " not in out
    assert "steps: walk=4 clean=3" in err


def test_parse_errors_exit_2(tmp_path):
    bad = tmp_path / "bad.gr"
    bad.write_text("node a e\nedge a E\n")
    code, _, err = run("height", "-r", data("clique.grs"), "-g", str(bad))
    assert code == 2 and f"{bad}:2:" in err
    assert run("height", "-r", data("clique.grs"), "-g", str(tmp_path / "missing.gr"))[0] == 2
    assert run("match", "-p", data("matching.grs"), "-g", data("g0.gr"), "--rule", "Nope")[0] == 2


def test_usage_errors_exit_2(capsys):
    assert run("bogus")[0] == 2
    assert run("height", "-r", data("clique.grs"))[0] == 2
    assert run("normalize", "-r", data("clique.grs"), "-g", data("c2.gr"), "--fuel", "-1")[0] == 2
    capsys.readouterr()


def test_output_is_reproducible():
    # fresh interpreters get different hash seeds; output must not depend on them
    args = ["terminate", "-r", data("q1q2.grs"), "-g", data("g1.gr")]
    outputs = set()
    for seed in ("1", "2", "3"):
        proc = subprocess.run(
            [sys.executable, "-m", "grw.cli", *args],
            capture_output=True,
            text=True,
            env={"PYTHONHASHSEED": seed, "GRW_COLOR": "0", "PATH": ""},
        )
        assert proc.returncode == 1
        outputs.add(proc.stdout)
    assert len(outputs) == 1


@pytest.mark.parametrize("value, colored", [("0", False), ("1", True)])
def test_color_switch(monkeypatch, value, colored):
    class Tty(io.StringIO):
        def isatty(self) -> bool:
            return True

    monkeypatch.setenv("GRW_COLOR", value)
    out = Tty()
    main(["terminate", "-r", data("clique.grs"), "-g", data("c2.gr")], out, io.StringIO())
    assert ("\033[" in out.getvalue()) is colored
