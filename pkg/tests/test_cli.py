import io
import subprocess
import sys


from nbalogic import power as pw
from nbalogic.cli import run
from nbalogic.logics import builtin, dump_logic


def call(*argv):
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()


def test_check_examples(capsys):
    assert call("check", "--logic", "builtin:lukasiewicz:3", "imp(x1,x1)") == (0, "valid\n")
    assert call("check", "--logic", "builtin:godel:3", "or(x1,not(x1))") == (1, "invalid\n")
    code, out = call("oracle", "--logic", "builtin:godel:3", "or(x1,not(x1))")
    assert (code, out) == (1, "invalid\n")
    assert "countermodel: x1=e2" in capsys.readouterr().err


def test_check_with_premises():
    code, out = call("check", "--logic", "builtin:lukasiewicz:3", "-p", "x1", "-p", "imp(x1,x2)", "x2")
    assert (code, out) == (0, "valid\n")


def test_check_logic_file(tmp_path):
    p = tmp_path / "g3.logic"
    p.write_text(dump_logic(builtin("godel", 3)))
    assert call("check", "--logic", str(p), "imp(x1,x1)") == (0, "valid\n")


def test_normalize_examples():
    assert call("normalize", "--n", "2", "--stage", "full", "q(x2,x1,e1)") == (0, "q(x1, e1, q(x2, e2, e1))\n")
    assert call("normalize", "--n", "2", "--stage", "hnf", "q(q(x1,e1,e2),e2,e1)") == (0, "q(x1, e2, e1)\n")


def test_normalize_trace():
    code, out = call("normalize", "--n", "2", "--trace", "q(x2,x1,e1)")
    lines = out.splitlines()
    assert code == 0 and lines[0] == "q(x1, e1, q(x2, e2, e1))"
    assert lines[1].startswith("  r7^1 q(x2, x1, e1) -> ")
    code, out = call("normalize", "--n", "2", "--stage", "hnf", "--trace", "q(e1, q(e2, x1, x2), x3)")
    assert out.splitlines() == ["x2", "  -> q(e1, x2, x3)", "  -> x2"]


def test_translate_and_equiv():
    assert call("translate", "--logic", "builtin:cl:2", "not(x1)") == (0, "q(x1, e2, e1)\n")
    assert call("equiv", "--n", "2", "q(x1,e1,e2)", "x1") == (0, "equivalent\n")
    assert call("equiv", "--n", "2", "x1", "x2") == (1, "not equivalent\n")


def test_mdd(tmp_path):
    code, out = call("mdd", "--n", "2", "q(x1,e1,e2)")
    assert code == 0 and out.startswith("digraph G {")
    target = tmp_path / "g.dot"
    assert call("mdd", "--n", "2", "-o", str(target), "q(x1,e1,e2)")[0] == 0
    assert target.read_text() == out


def test_usage_and_input_errors(capsys):
    assert call("check", "--logic", "builtin:godel:3", "or(x1")[0] == 2
    assert call("check", "--logic", "builtin:nope:3", "x1")[0] == 2
    assert call("normalize", "--n", "2", "e3")[0] == 2
    assert call("bogus")[0] == 2
    assert call("check", "--logic", "/nonexistent/file", "x1")[0] == 2
    assert "error:" in capsys.readouterr().err


def test_algebra_verify(tmp_path):
    good = tmp_path / "p.alg"
    good.write_text("algebra P\nn 3\npointwise-power 2\n")
    code, out = call("algebra", "verify", str(good))
    assert code == 0
    assert "A6 ok" in out and "central elements 9/9" in out and "nBA" in out
    assert "representation ok: |B_A|=4, central vectors=9" in out
    small = tmp_path / "n.alg"
    small.write_text("algebra N\nn 2\npointwise-power 1\n")
    code, out = call("algebra", "verify", str(small))
    assert code == 0 and "simplicity ok" in out


def test_algebra_verify_failure(tmp_path):
    rows = [f"q {x} {y} {z} -> {z if x == 1 else y}" for x in range(3) for y in range(3) for z in range(3)]
    bad = tmp_path / "bad.alg"
    bad.write_text("algebra bad\nn 2\nuniverse 3\nconstant 1 0\nconstant 2 1\n" + "\n".join(rows) + "\n")
    code, out = call("algebra", "verify", str(bad))
    assert code == 1
    assert "A4 fails" in out and "not an nBA" in out


def test_power_verify(tmp_path):
    p = tmp_path / "z4.sr"
    p.write_text(pw.dump_semiring(pw.zmod(4)))
    code, out = call("power", "verify", "--semiring", str(p), "--e-size", "2")
    assert code == 0
    assert "C(R) = {0, 1}" in out and "centrality cross-check 16/16 agree" in out
    assert "|E[C(R)]| = 2 = 2^1 ok" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "nbalogic", "check", "--logic", "builtin:cl:2", "or(x1,not(x1))"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout == "valid\n"
