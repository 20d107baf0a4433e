import io
import json
import subprocess
import sys

import pytest

from faceiter.cli import run


def cli(args, stdin="", monkeypatch=None):
    proc = subprocess.run(
        [sys.executable, "-m", "faceiter", *args],
        input=stdin, capture_output=True, text=True, timeout=120,
    )
    return proc.returncode, proc.stdout, proc.stderr


@pytest.fixture
def call(monkeypatch, capsys):
    def go(args, stdin=""):
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
        code = run(args)
        out, err = capsys.readouterr()
        return code, out, err
    return go


def gen(call, *args):
    code, out, _ = call(["gen", *args])
    assert code == 0
    return out


def test_pipeline_examples():
    code, doc, _ = cli(["gen", "simplex", "2"])
    assert code == 0
    assert cli(["fvector"], doc)[1].strip() == "1 3 3 1"
    assert cli(["fvector"], cli(["gen", "rp2"])[1])[1].strip() == "1 10 15 6 1"
    assert cli(["kunz-bad", "3"])[1].strip() == "bad orbits: 0"


def test_faces_square_stream(call):
    code, out, err = call(["faces", "--stats"], "4\n1 2\n1 4\n2 3\n3 4\n")
    assert code == 0
    assert out.splitlines() == [
        "-1 1 2 3 4", "0 1 2", "1 1", "2 {}", "1 2", "0 1 4", "1 4", "0 2 3", "1 3", "0 3 4"
    ]
    assert "phi=10" in err and "max_depth=3" in err


def test_flags(call):
    square = "4\n3 4\n1 2\n2 3\n1 4\n"
    out = call(["faces", "--lex-sort", "--no-top"], square)[1].splitlines()
    assert out[0] == "0 1 2" and len(out) == 9
    out = call(["faces", "--lex-sort", "--far-face=3,4"], square)[1].splitlines()
    assert len(out) == 6
    assert call(["fvector", "--dual"], gen(call, "rp2"))[1].strip() == "1 6 15 10 1"


@pytest.mark.parametrize("tasks", [2, 3, 8])
def test_tasks_sorted_equal(call, tasks):
    for fam in (["hypercube", "4"], ["rp2"], ["cyclic", "4", "8"]):
        doc = gen(call, *fam)
        one = call(["faces", "--sorted"], doc)[1]
        many = call(["faces", "--sorted", f"--tasks={tasks}"], doc)[1]
        assert one == many
        assert call(["fvector", f"--tasks={tasks}"], doc)[1] == call(["fvector"], doc)[1]


def test_stats_deterministic(call):
    doc = gen(call, "cross_polytope", "4")
    a = call(["faces", "--stats"], doc)[2]
    b = call(["faces", "--stats"], doc)[2]
    assert a == b and "phi=" in a


def test_hasse_and_dual(call):
    code, out, _ = call(["hasse"], gen(call, "simplex", "2"))
    assert code == 0 and out.splitlines()[0] == "levels 1 3 3 1" and len(out.splitlines()) == 1 + 12
    code, out, _ = call(["hasse", "--ungraded", "--json"], gen(call, "example_2_7_left"))
    assert len(json.loads(out)["edges"]) == 14
    code, out, _ = call(["dual"], gen(call, "rp2"))
    d = json.loads(out)
    assert d["n_atoms"] == 10 and len(d["coatoms"]) == 6


def test_check(call):
    code, out, _ = call(["check", "--oracle"], "4\n1 2\n1 4\n2 3\n3 4\n")
    assert code == 0 and "locally branched: yes" in out and "atomic: yes" in out
    code, out, _ = call(["check"], "3\n1 2\n1\n")
    assert code == 1 and "nested_coatoms" in out
    code, out, _ = call(["check", "--fix", "--output-format", "text"], "3\n1 2\n1\n")
    assert code == 0 and out.splitlines()[-2:] == ["3", "1 2"]


def test_complex_document(call):
    out = call(["faces"], gen(call, "complex_example"))[1].splitlines()
    assert len(out) == 8


def test_exit_codes(call):
    assert call(["faces"], "3\n1 2\n1 5\n")[0] == 1
    assert call(["faces"], "{not json")[0] == 1
    code, _, err = call(["kunz-rays", "10"])
    assert code == 2 and "ray file" in err
    assert call(["check", "--oracle"], gen(call, "hypercube", "5"))[0] == 2
    assert call(["hasse"], gen(call, "example_2_7_left"))[0] == 3
    assert call(["faces", "--tasks=0"], gen(call, "rp2"))[0] == 1


def test_kunz_verbs(call, tmp_path):
    code, out, _ = call(["kunz-rays", "3"])
    assert out.splitlines() == ["m 3 rays 2", "1 2", "2 1"]
    rays = tmp_path / "r7.txt"
    call(["kunz-rays", "7", "-o", str(rays)])
    census = tmp_path / "c.txt"
    code, out, _ = call(["kunz-bad", "7", "--rays", str(rays), "--oracle", "--census", str(census)])
    assert code == 0 and out.splitlines() == ["bad orbits: 0", "oracle bad orbits: 0"]
    assert census.read_text() == ""
    assert call(["kunz-bad", "6", "--rays", str(rays)])[0] == 1
    code, out, _ = call(["kunz-bad", "9", "--no-e-gt-t"])
    assert code == 0 and out.startswith("bad orbits: ")
