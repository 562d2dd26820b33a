import json

import pytest

from hecke.cli import run
from hecke.numberfield import make_context
from hecke.rpf import verify
from hecke.serialize import ratfunc_from_json, report_to_json

GOLDEN_SPEC = {"p": 3, "k": 1, "classes": [{"form": [1, -1, -1], "coeff": 1}]}
ONE_OVER_Z = {"field": {"p": 3, "D": None}, "num": [["1/1"]], "den": [["0/1"], ["1/1"]]}


def run_json(capsys, argv, code=0):
    assert run(argv) == code
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def spec_file(tmp_path):
    path = tmp_path / "spec.json"
    path.write_text(json.dumps(GOLDEN_SPEC))
    return str(path)


def test_minpoly(capsys):
    assert run_json(capsys, ["minpoly", "--p", "7"]) == {"p": 7, "minpoly": [1, -1, -2, 1]}


def test_minpoly_latex(capsys):
    assert run(["minpoly", "--p", "5", "--output", "latex"]) == 0
    assert capsys.readouterr().out.strip() == "m_{5}(x) = x^{2} - x - 1"


def test_generators(capsys):
    out = run_json(capsys, ["generators", "--p", "5"])
    assert out["U"]["word"] == "U"
    assert out["T"]["b"] == ["-1/1", "0/1"]


def test_cycle(capsys):
    out = run_json(capsys, ["cycle", "--p", "3", "--form", "1,-1,-1"])
    assert len(out["forms"]) == 2
    assert out["exponents"] == [2, 1]
    assert out["symmetric"] is True


def test_classes_keeps_p_order(capsys):
    out = run_json(capsys, ["classes", "--p", "4", "--p", "3", "--word-len", "2", "--workers", "2"])
    assert [o["p"] for o in out] == [4, 3]
    tags = [c["class_tag"] for c in out[1]["classes"]]
    assert '[["1/1"],["-1/1"],["-1/1"]]' in tags
    assert tags == sorted(tags)


def test_build_from_spec(capsys, spec_file):
    out = run_json(capsys, ["build", "--spec", spec_file])
    assert out["rpf"]["field"] == {"p": 3, "D": None}
    assert out["spec"]["classes"][0]["cycle"]["class_tag"] == '[["1/1"],["-1/1"],["-1/1"]]'
    assert out["spec"]["mode"] == "symmetric"


def test_build_from_flags_latex(capsys):
    assert run(["build", "--p", "3", "--k", "1", "--form", "1,-1,-1", "--output", "latex"]) == 0
    assert "\\frac" in capsys.readouterr().out


def test_verify_golden(capsys, spec_file):
    out = run_json(capsys, ["verify", "--p", "3", "--k", "1", "--spec", spec_file])
    assert out["passed"] is True
    assert out["pole_audit"]["ok"] is True
    assert out["numeric"] is None


def test_verify_numeric_check(capsys, spec_file):
    out = run_json(capsys, ["verify", "--spec", spec_file, "--numeric-check", "3"])
    assert out["numeric"]["points"] == 3
    assert out["numeric"]["ok"] is True


def test_verify_numeric_bits(capsys, spec_file):
    argv = ["verify", "--spec", spec_file, "--numeric-check", "2", "--numeric-bits", "96"]
    out = run_json(capsys, argv)
    assert out["numeric"]["bits"] == 96
    assert out["numeric"]["tolerance"] == 2.0 ** -64
    assert out["numeric"]["ok"] is True


def test_verify_failure_exit_code(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps(ONE_OVER_Z))
    out = run_json(capsys, ["verify", "--k", "2", "--spec", str(path)], code=1)
    assert out["passed"] is False
    assert out["relation1_zero"] is False


def test_build_then_verify_roundtrip(capsys, spec_file, tmp_path):
    built = run_json(capsys, ["build", "--spec", spec_file])
    path = tmp_path / "rpf.json"
    path.write_text(json.dumps(built["rpf"]))
    out = run_json(capsys, ["verify", "--k", "1", "--spec", str(path)])
    q = ratfunc_from_json(built["rpf"])
    assert out == report_to_json(verify(make_context(3), q, 1))


def test_batch_verify(capsys, tmp_path):
    path = tmp_path / "q.json"
    path.write_text(json.dumps(ONE_OVER_Z))
    out = run_json(capsys, ["verify", "--k", "1", "--spec", str(path), "--spec", str(path)])
    assert [r["passed"] for r in out] == [True, True]


def test_audit(capsys, spec_file):
    out = run_json(capsys, ["audit", "--spec", spec_file])
    assert out["pole_audit"]["ok"] is True
    assert len(out["pole_audit"]["poles"]) == 4
    assert out["decomposition"][0]["alternation_ok"] is True
    assert all(e["ok"] for e in out["pp_invariance"])


@pytest.mark.parametrize("argv", [
    ["minpoly"],
    ["minpoly", "--p", "3", "--bogus"],
    ["frobnicate"],
    ["minpoly", "--p", "2"],
    ["verify"],
    ["verify", "--spec", "/nonexistent/spec.json"],
    ["verify", "--p", "4", "--k", "1", "--spec", "-"],
    ["cycle", "--p", "3", "--form", "1,2"],
    ["cycle", "--p", "3", "--form", "1,-1,-1", "--precision", "2"],
    ["verify", "--spec", "-", "--numeric-check", "2", "--numeric-bits", "4"],
])
def test_usage_errors(argv, monkeypatch):
    import io
    monkeypatch.setattr("sys.stdin", io.StringIO(json.dumps(GOLDEN_SPEC)))
    assert run(argv) == 2


def test_audit_square_discriminant(capsys):
    out = run_json(capsys, ["audit", "--p", "4", "--k", "1", "--form", "1,0,-1"])
    assert out["pole_audit"]["ok"] is True
    assert out["decomposition"][0]["alternation_ok"] is True
    assert all(e["ok"] for e in out["pp_invariance"])
