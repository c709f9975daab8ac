import json
import subprocess
import sys
from pathlib import Path

import pytest

from frobkit.cli import main, run

ROOT = Path(__file__).resolve().parent.parent
FIX = ROOT / "fixtures"

CASES = [
    (["slopes", "e-half.json"], 0),
    (["charpoly", "half-twist.json"], 0),
    (["decompose", "ordinary-q9.json"], 0),
    (["dm", "e-half.json"], 0),
    (["descend", "half-twist.json", "--to", "Qp"], 1),
    (["descend", "half-twist.json", "--to", "Qp2"], 0),
    (["descend", "half-twist.json", "--to", "Qp(p^(1/2))"], 0),
    (["descend", "ordinary-q9.json", "--to", "Qp"], 0),
    (["twist", "e-half.json", "--by", "1/2"], 0),
    (["twist-plan", "--point-slopes=-1/2,1/2", "--p", "3", "--det", "tate", "--coeff", "Qp"], 0),
    (["twist-plan", "--point-slopes=-1/3,1/3", "--p", "3", "--det", "tate", "--coeff", "Qp"], 1),
    (["twist-plan", "--point-slopes=0,0", "--p", "3"], 1),
    (["cocycle", "half-twist-q9.json", "--to", "Qp"], 1),
    (["lattice", "e-half.json"], 0),
    (["classify", "e-half.json"], 0),
    (["lint", "dataset.json"], 0),
    (["finmon", "dataset.json"], 1),
    (["finmon", "unit-root.json", "--rank2-check"], 0),
]


def argv(args):
    return [str(FIX / a) if a.endswith(".json") else a for a in args]


@pytest.mark.parametrize("args,code", CASES, ids=[" ".join(a) for a, _ in CASES])
def test_exit_codes(args, code):
    got, report, _ = run(argv(args))
    assert got == code, report
    assert report["verb"] == args[0]


def test_reports():
    _, rep, _ = run(argv(["slopes", "e-half.json"]))
    assert rep["slopes"] == [["1/2", 2]]
    _, rep, _ = run(argv(["descend", "half-twist.json", "--to", "Qp"]))
    assert rep["outcome"] == "obstructed" and rep["error"] == "Obstructed"
    _, rep, _ = run(argv(["lint", "dataset.json"]))
    assert rep["census"] == {"ordinary": 2, "supersingular": 2}
    _, rep, _ = run(argv(["twist-plan", "--point-slopes=-1/2,1/2", "--p", "3"]))
    assert rep["q_prime"] == 9 and rep["predicted_slopes"] == ["0", "1"]


def test_bad_input(tmp_path):
    assert run(argv(["slopes", "missing.json"]))[0] == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(["slopes", str(bad)])[0] == 2
    shape = tmp_path / "shape.json"
    shape.write_text(json.dumps({"p": 3, "matrix": [["1", "0"]]}))
    assert run(["slopes", str(shape)])[0] == 2
    assert run(["descend", str(FIX / "e-half.json")])[0] == 2
    assert run(["nonsense"])[0] == 2


def test_output_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(argv(["slopes", "e-half.json"]) + ["-o", str(out)]) == 0
    assert json.loads(out.read_text())["slopes"] == [["1/2", 2]]
    assert capsys.readouterr().out == ""


def test_seed_recorded():
    code, rep, _ = run(argv(["descend", "ordinary-q9.json", "--to", "Qp", "--seed", "7"]))
    assert code == 0 and rep["seed"] == 7 and rep["certificate_verified"]


def _cli(args):
    return subprocess.run([sys.executable, "-m", "frobkit.cli", *argv(args)],
                          capture_output=True, check=False, cwd=ROOT)


@pytest.mark.parametrize("args", [
    ["descend", "ordinary-q9.json", "--to", "Qp"],
    ["cocycle", "half-twist-q9.json", "--to", "Qp"],
    ["lint", "dataset.json"],
    ["descend", "ordinary-q9.json", "--to", "Qp", "--seed", "3"],
])
def test_byte_identical(args):
    a, b = _cli(args), _cli(args)
    assert a.stdout == b.stdout and a.returncode == b.returncode
    assert a.stdout
