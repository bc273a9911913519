import io
import subprocess
import sys

import pytest

from unets.calculus import parse_proof
from unets.cli import (
    BENCH_HEADER, EXIT_CAP, EXIT_ILL_FORMED, EXIT_INCORRECT, EXIT_OK, EXIT_PARSE, bench_row, main,
)
from unets.nets import Linking

THETA = "ex y. (~P * ~Q(y)), P | all x. Q(x)\nlinks: (0 2) (1 3)\n"
THETA_BAD = "ex y. (~P | ~Q(y)), P * all x. Q(x)\nlinks: (0 2) (1 3)\n"
FIG5 = ("all x. ~P(f(x)), cut{ ex y. P(y) ; all y. ~P(y) }, ex z. (P(z) * (~Q(z) | Q(z)))\n"
        "links: (0 4) (1 5) (2 3)\n")


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def _fields(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


def test_check_correct_and_incorrect(files):
    code, out, _ = run("--format", "machine", "check", files("t.net", THETA))
    f = _fields(out)
    assert code == EXIT_OK and f["verdict"] == "correct" and f["leaps"] == "1"
    code, out, _ = run("--format", "machine", "check", files("b.net", THETA_BAD))
    f = _fields(out)
    assert code == EXIT_INCORRECT and f["verdict"] == "switching-failure"
    assert "witness" in f


def test_check_text_mode_and_dot(files, tmp_path):
    dot = tmp_path / "g.dot"
    code, out, _ = run("check", files("t.net", THETA), "--dot", str(dot))
    assert code == EXIT_OK
    assert out.startswith("verdict: correct")
    assert dot.read_text().startswith("digraph")


def test_exit_codes(files):
    assert run("check", files("p.net", "P(x\nlinks: (0 1)"))[0] == EXIT_PARSE
    assert run("check", files("i.net", "P, P\nlinks: (0 1)"))[0] == EXIT_ILL_FORMED
    assert run("check", files("u.net", "P(a), ~P(b)\nlinks: (0 1)"))[0] == EXIT_INCORRECT
    assert run("check", "/nonexistent/file.net")[0] == EXIT_ILL_FORMED
    code, out, _ = run("--format", "machine", "--max-nodes", "1000", "girard",
                       files("q.net", gen_text("quantifier-blowup", 16)))
    assert code == EXIT_CAP and _fields(out)["error"] == "cap"


def gen_text(name, n):
    code, out, _ = run("gen", name, str(n))
    assert code == EXIT_OK
    return out


def test_normalize_with_trace(files):
    code, out, _ = run("normalize", files("f.net", FIG5), "--trace")
    assert code == EXIT_OK
    assert out.count("-- step") == 3
    assert "steps: 2" in out
    code, out, _ = run("normalize", files("b.net", THETA_BAD))
    assert code == EXIT_INCORRECT


def test_translate_and_sequentialize(files):
    proof = "(exists 0 x f(c) (~P(x)) (exists 1 y f(c) (P(y)) (ax ~P(f(c)))))"
    code, out, _ = run("translate", files("p.proof", proof))
    assert code == EXIT_OK
    net = Linking.parse(out)
    assert net.index_pairs() == [(0, 1)]
    code, out, _ = run("sequentialize", "--compact", files("t.net", THETA))
    assert code == EXIT_OK
    parse_proof(out)


def test_girard_and_equiv(files):
    code, out, _ = run("girard", files("t.net", THETA))
    assert code == EXIT_OK and "witness" in out
    a = files("a.proof", "(exists 0 x f(c) (~P(x)) (exists 1 y f(c) (P(y)) (ax ~P(f(c)))))")
    b = files("b.proof", "(exists 1 y g(z) (P(y)) (exists 0 x g(z) (~P(x)) (ax ~P(g(z)))))")
    code, out, _ = run("--format", "machine", "equiv", a, b)
    assert code == EXIT_OK and _fields(out)["equivalent"] == "true"


def test_gen_output_parses():
    for name in ("par-blowup", "quantifier-blowup", "cut-chain"):
        Linking.parse(gen_text(name, 3))


def test_bench(files):
    code, out, _ = run("--format", "machine", "bench", "cut-chain", "1", "4")
    rows = [dict(kv.split("=") for kv in line.split()) for line in out.splitlines()]
    assert code == EXIT_OK and len(rows) == 2
    assert rows[1]["normalize_steps"] == "6" and rows[1]["peak_count"] == "16"
    code, out, _ = run("bench", "quantifier-blowup", "4")
    assert out.split("\n")[0].split() == BENCH_HEADER
    assert bench_row("par-blowup", 5, 10 ** 6)[6] == 32
    assert bench_row("quantifier-blowup", 4, 10 ** 6)[6] == 30
    assert bench_row("quantifier-blowup", 24, 10 ** 6)[5] == "cap"


def test_stdin_and_console_script(files):
    r = subprocess.run([sys.executable, "-m", "unets.cli", "check", "-"], input=THETA,
                       capture_output=True, text=True)
    assert r.returncode == EXIT_OK and "verdict: correct" in r.stdout
    r = subprocess.run([sys.executable, "-m", "unets.cli", "--version"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.startswith("unets ")
