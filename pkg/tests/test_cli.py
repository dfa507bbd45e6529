import json
import subprocess
import sys

import pytest

from drinfeld_nh.cli import main
from drinfeld_nh.config import Config, ConfigError
from drinfeld_nh.expr import FormSyntaxError, parse_form
from drinfeld_nh.field import field
from drinfeld_nh.forms import GradedForm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_parse_form_names():
    F = field(3)
    g, h, E, Y = (GradedForm.gen(F, v) for v in "ghEY")
    assert parse_form(F, "g^2*h - 2*g*g*h") == g * g * h - (g * g * h).scale(2)
    assert parse_form(F, "Delta") == -(h ** 2)
    assert parse_form(F, "E2") == E - Y
    assert parse_form(F, "theta*g") == parse_form(F, "θ*g")


@pytest.mark.parametrize("bad", ["g +", "g / h", "g^h", "foo", "g + h", "g^-1"])
def test_parse_form_errors(bad):
    with pytest.raises(FormSyntaxError):
        parse_form(field(3), bad)


def test_config_precedence(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"q": 4, "prec": 40, "seed": 7}))
    cfg = Config.load(str(path), env={"DNH_PREC": "50"}, overrides={"seed": 9, "q": None})
    assert (cfg.q, cfg.prec, cfg.seed) == (4, 50, 9)
    assert Config.load(env={}) == Config()


@pytest.mark.parametrize("over", [{"q": 6}, {"q": 3, "prec": 4}, {"format": "xml"}, {"q": 512}])
def test_config_validation(over):
    with pytest.raises(ConfigError):
        Config.load(env={}, overrides=over)


def test_config_rejects_unknown_keys(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({"colour": "red"}))
    with pytest.raises(ConfigError):
        Config.load(str(path), env={})


def test_expand_generator(capsys):
    code, out, _ = run(capsys, "expand", "h", "--q", "3", "--prec", "12")
    assert code == 0
    data = json.loads(out)
    assert data["form"] == "h" and data["q"] == 3
    code, out2, _ = run(capsys, "expand", "h", "--q", "3", "--prec", "12")
    assert out2 == out


def test_expand_table_format(capsys):
    code, out, _ = run(capsys, "expand", "E", "--q", "3", "--prec", "9", "--format", "table")
    assert code == 0
    assert out.splitlines()[1] == "u^1\t1*θ^0"


def test_decompose_delta_of_discriminant(capsys):
    code, out, _ = run(capsys, "decompose", "Delta", "--delta", "1", "--q", "3")
    assert code == 0
    assert json.loads(out) == ["0", "(2*θ^0)*h^2"]


def test_apply_chain(capsys):
    code, out, _ = run(capsys, "apply", "delta:1", "g", "--q", "3")
    assert code == 0
    data = json.loads(out)
    assert data["weight"] == 4 and data["type"] == 1


def test_bracket_and_membership(capsys):
    code, out, _ = run(capsys, "bracket", "g", "h", "--r", "1", "--q", "3")
    assert code == 0 and json.loads(out)["form"] is not None
    code, out, _ = run(capsys, "membership", "--form", "g*h", "--k", "6", "--m", "1", "--q", "3")
    assert code == 0 and json.loads(out)["member"]
    code, out, _ = run(capsys, "membership", "--form", "E", "--k", "2", "--m", "1", "--q", "3")
    assert code == 1 and not json.loads(out)["member"]


def test_membership_from_series_file(capsys, tmp_path):
    code, out, _ = run(capsys, "expand", "g", "--q", "3", "--prec", "30")
    path = tmp_path / "g.json"
    path.write_text(json.dumps(json.loads(out)["series"]))
    code, out, _ = run(capsys, "membership", "--series", str(path), "--k", "2", "--q", "3")
    assert code == 0 and json.loads(out)["member"]


def test_uop(capsys):
    code, out, _ = run(capsys, "uop", "h", "--r", "4", "--q", "3", "--prec", "40")
    assert code == 0
    data = json.loads(out)
    assert data["k"] == 4 and not data["zero"]


def test_psi_and_eval(capsys):
    code, out, _ = run(capsys, "psi", "sqrt-theta", "--variant", "odd-I", "--q", "3")
    assert code == 0 and json.loads(out)["fixed"] is False
    code, out, _ = run(capsys, "eval", "xi", "--q", "3", "--vdigits", "10")
    assert code == 0 and json.loads(out)["form"] == "u"


def test_verify_exit_code_and_seed(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "appendix-a", "--q", "3", "--seed", "5",
                       "--format", "table")
    assert code == 0
    assert out.splitlines()[0] == "seed 5"
    assert all(line.startswith("PASS") for line in out.splitlines()[1:])


def test_usage_errors(capsys):
    assert run(capsys, "expand", "g", "--q", "6")[0] == 2
    assert run(capsys, "expand", "g +", "--q", "3")[0] == 2
    assert run(capsys, "decompose", "E*Y", "--q", "3")[0] == 2
    assert run(capsys, "apply", "gamma:1", "g", "--q", "3")[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "drinfeld_nh", "expand", "g", "--q", "2", "--prec", "8"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["form"] == "g"


def test_verify_json_report_schema(capsys):
    code, out, err = run(capsys, "verify", "--suite", "appendix-a", "--q", "2", "--seed", "3")
    assert code == 0
    assert err.strip() == "seed 3"
    report = json.loads(out)
    assert isinstance(report, list) and report
    assert all(set(r) == {"id", "anchor", "status", "detail"} for r in report)
    assert {r["status"] for r in report} == {"pass"}


def test_verify_reports_failure_exit_code(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "u-operators", "--q", "2", "--prec", "40",
                       "--format", "table")
    assert code == 1
    assert any(line.startswith("FAIL") for line in out.splitlines())
    assert any("U_{3}^{3}(h) = h^{5}/(θ²−θ)" in line and line.startswith("PASS")
               for line in out.splitlines())
