"""CLI surface: commands, file format, exit codes, output determinism."""

import json

from click.testing import CliRunner

from qalg.cli import main

DRAKE_B = "f(z) = 1 + z*f(z) + q*z^2*f(z)*f(q*z)"


def run(*args):
    return CliRunner().invoke(main, list(args))


def test_analyze_inline_text():
    res = run("analyze", DRAKE_B, "--inline")
    assert res.exit_code == 0
    assert "DivergentCandidate (H = 1/4, h = 2)" in res.output
    assert "sign condition: True" in res.output


def test_analyze_json_schema():
    res = run("analyze", DRAKE_B, "--inline", "--format", "json")
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["schema"] == "qalg/1"
    assert out["classification"]["kind"] == "DivergentCandidate"


def test_solve_exact_csv():
    res = run("solve", "f(z) + q*z*f(z) - z - q*z^2", "--inline",
              "--exact-base", "2", "--N", "4")
    assert res.exit_code == 0
    lines = res.output.strip().splitlines()
    assert lines[0] == "n,value"
    assert lines[2] == '1,"1"'


def test_solve_numeric_json():
    res = run("solve", DRAKE_B, "--inline", "--q", "2", "--N", "8",
              "--format", "json")
    assert res.exit_code == 0
    out = json.loads(res.output)
    assert out["mode"] == "numeric" and out["N"] == 8


def test_asym_text_and_not_applicable():
    res = run("asym", DRAKE_B, "--inline", "--q", "2", "--N", "120",
              "--precision-bits", "160")
    assert res.exit_code == 0
    assert "q-Gevrey order 1/2" in res.output
    res2 = run("asym", "f(z) + q*z*f(z) - z - q*z^2", "--inline", "--q", "2")
    assert res2.exit_code == 0
    assert "not applicable" in res2.output


def test_parse_error_exit_2():
    res = run("analyze", "f(z) ++ 1", "--inline")
    assert res.exit_code == 2
    res = run("solve", "1/f(z)", "--inline")
    assert res.exit_code == 2
    assert "clear denominators" in res.output


def test_empty_equation_exit_2(tmp_path):
    p = tmp_path / "empty.eq"
    p.write_text("")
    res = run("analyze", str(p))
    assert res.exit_code == 2


def test_existence_failure_exit_1():
    res = run("analyze", "f(q*z) - q^2*f(z) + z^3*f(q*z)*f(z) + 1", "--inline")
    assert res.exit_code == 1
    out = json.loads(res.output.strip().splitlines()[-1])
    assert out["finding"] == "existence-fails" and out["n"] == 2


def test_equation_file_header(tmp_path):
    p = tmp_path / "drake.eq"
    p.write_text("# lattice-path equation\n"
                 "field-D: 2\n"
                 "q: 2\n"
                 "precision-bits: 160\n"
                 "N: 60\n"
                 "\n"
                 f"{DRAKE_B}\n")
    res = run("solve", str(p))
    assert res.exit_code == 0
    assert res.output.startswith("n,re,im")


def test_determinism_same_bytes():
    a = run("solve", DRAKE_B, "--inline", "--q", "2", "--N", "30",
            "--precision-bits", "160").output
    b = run("solve", DRAKE_B, "--inline", "--q", "2", "--N", "30",
            "--precision-bits", "160").output
    assert a == b


def test_corpus_list():
    res = run("corpus", "list")
    assert res.exit_code == 0
    ids = [line.split()[0] for line in res.output.strip().splitlines()]
    assert ids == ["running", "qp1", "drake-a", "drake-b", "gessel", "jones",
                   "cfa", "designed"]


def test_corpus_single_entry():
    res = run("corpus", "run", "--entry", "designed")
    assert res.exit_code == 0
    assert "all checks passed" in res.output


def test_cfa_file_pipeline(tmp_path):
    from qalg.corpus import CFA_TEXT
    p = tmp_path / "cfa.eq"
    p.write_text("field-D: 2\nramify: 2\n"
                 "branch: 0,0,0,0,1,0,0,rho,0,0\n"
                 "max-steps: 40\n\n" + CFA_TEXT + "\n")
    res = run("analyze", str(p))
    assert res.exit_code == 0
    assert "H = 3/34, h = 17" in res.output
