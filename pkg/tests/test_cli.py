import csv
import io
import json
import math

import numpy as np
import pytest

from varineq.cli import CSV_COLUMNS, KEYS, RunConfig, cmd_check, main, parse_config_text
from varineq.errors import ConfigurationError

PEND_EQ = """\
# pendulum at rest on a short interval
[problem]
problem = pendulum
trajectory = equilibrium
[interval]
alpha = 0
beta = 1
[phi]
lambda = 1
n = 3
[model]
m = 1
ell = 1
g = 1
"""


@pytest.fixture
def write(tmp_path):
    def _write(text, name="run.cfg"):
        p = tmp_path / name
        p.write_text(text)
        return str(p)

    return _write


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_check_pendulum_equilibrium(write, capsys):
    code, out, _ = run(["check", "--config", write(PEND_EQ), "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["inequality_margin"] > 0
    assert rep["config"]["g"] == 1.0


def test_default_configuration_exits_zero(capsys):
    code, out, _ = run(["check"], capsys)
    assert code == 0
    assert "separatrix" in out and "exit 0" in out


def test_harmonic_past_conjugate_point(capsys):
    code, out, _ = run(["check", "--problem", "harmonic", "--beta", "4.0", "--format", "json"], capsys)
    assert code == 3
    assert json.loads(out)["inequality_margin"] < 0


def test_inadmissible_n(capsys):
    code, _, err = run(["check", "--n", "2"], capsys)
    assert code == 1
    assert "n >= 3" in err


def test_inadmissible_sampled_phi_exit_2(write, capsys, tmp_path):
    x = np.linspace(0, 1, 101)
    rows = "\n".join(f"{a!r},{a * (1 - a)!r},{1 - 2 * a!r}" for a in x.tolist())
    phi = write("x,phi,phi_prime\n" + rows + "\n", "phi.csv")
    code, out, _ = run(["check", "--problem", "harmonic", "--beta", "1", "--phi-file", phi, "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 2
    assert rep["boundary_ok"] is False
    assert rep["inequality_margin"] is not None


def test_malformed_config_line_number(write, capsys):
    code, _, err = run(["check", "--config", write("problem = harmonic\nn = three\n")], capsys)
    assert code == 1
    assert ":2:" in err


@pytest.mark.parametrize("text,fragment", [
    ("nonsense line\n", ":1:"),
    ("[a]\nbogus = 1\n", "unknown key"),
    ("n = 3\nn = 4\n", "duplicate"),
    ("beta = inf\n", "finite"),
])
def test_config_errors(text, fragment):
    with pytest.raises(ConfigurationError, match=fragment):
        parse_config_text(text)


def test_flags_override_config(write, capsys):
    code, out, _ = run(["check", "--config", write(PEND_EQ), "--n", "4", "--format", "json"], capsys)
    assert json.loads(out)["config"]["n"] == 4


def test_config_comments_and_coeffs():
    vals = parse_config_text("; header comment\nproblem = poly  # bilinear plus square\ncoeffs = 0,1,1:1; 0,2,0:0.5\n")
    assert vals["coeffs"] == {(0, 1, 1): 1.0, (0, 2, 0): 0.5}


def test_poly_problem_from_config(write, capsys):
    cfg = write("problem = poly\ncoeffs = 0,1,1:1\nbeta = 1\n")
    code, out, _ = run(["check", "--config", cfg, "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert abs(rep["I2_paper"]) < 1e-15


def test_rk4_trajectory(capsys):
    code, out, _ = run(["check", "--trajectory", "rk4", "--theta0", "0.3", "--g", "1", "--beta", "1", "--format", "json"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["el_residual_max"] < 1e-6
    assert rep["residual_AC"] < 1e-9


def test_separatrix_rejected_for_harmonic(capsys):
    code, _, err = run(["check", "--problem", "harmonic", "--trajectory", "separatrix"], capsys)
    assert code == 1 and "pendulum" in err


def test_unknown_problem(capsys):
    code, _, err = run(["check", "--problem", "nosuch"], capsys)
    assert code == 1 and "arclength" in err


def test_json_output_deterministic(write, capsys, tmp_path):
    cfg = write(PEND_EQ)
    outs = []
    for i in range(2):
        path = tmp_path / f"r{i}.json"
        assert main(["check", "--config", cfg, "--format", "json", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_csv_single_row(capsys):
    code, out, _ = run(["check", "--problem", "harmonic", "--beta", "3.5", "--format", "csv"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 2 and len(rows[1]) == len(CSV_COLUMNS)
    rec = dict(zip(rows[0], rows[1]))
    assert float(rec["inequality_margin"]) > 0 and rec["margin38"] == "NA"


def test_csv_floats_round_trip(capsys):
    _, out, _ = run(["check", "--format", "csv"], capsys)
    rec = dict(zip(*csv.reader(io.StringIO(out))))
    assert float(rec["theta0"]) == math.pi / 2
    assert len(rec["theta0"].replace(".", "").lstrip("0")) == 17


def test_sweep_n(capsys):
    code, out, _ = run(["sweep", "--trajectory", "equilibrium", "--g", "1", "--beta", "1",
                        "--axis", "n=3,4,5", "--axis", "lambda=1"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert [r["n"] for r in rows] == ["3", "4", "5"]
    assert all(float(r["inequality_margin"]) > 0 for r in rows)


def test_sweep_beta_sign_change(capsys):
    code, out, _ = run(["sweep", "--problem", "harmonic", "--axis", "beta=3.5,4.0"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0
    assert float(rows[0]["inequality_margin"]) > 0 > float(rows[1]["inequality_margin"])


def test_sweep_lexicographic_order(capsys):
    _, out, _ = run(["sweep", "--problem", "harmonic", "--beta", "1", "--axis", "lambda=2,1", "--axis", "n=4,3"], capsys)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["lambda"], r["n"]) for r in rows] == [("2", "4"), ("2", "3"), ("1", "4"), ("1", "3")]


def test_sweep_error_row_does_not_abort(capsys):
    code, out, err = run(["sweep", "--problem", "harmonic", "--beta", "1", "--axis", "n=2,3"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 1
    assert len(rows) == 3 and all(len(r) == len(CSV_COLUMNS) for r in rows)
    assert rows[1][-1] == "ERROR" and rows[2][-1] == "true"
    assert "n = 2" in err


@pytest.mark.parametrize("axis", ["n=", "bogus=1,2", "n"])
def test_sweep_bad_axis(axis, capsys):
    code, _, _ = run(["sweep", "--axis", axis], capsys)
    assert code == 1


def test_sweep_requires_axis(capsys):
    assert run(["sweep"], capsys)[0] == 1


def test_catalog_listing(capsys):
    code, out, _ = run(["catalog"], capsys)
    assert code == 0
    for name in ("pendulum", "harmonic", "arclength", "poly"):
        assert name in out


def test_catalog_json(capsys):
    code, out, _ = run(["catalog", "--json"], capsys)
    names = [e["name"] for e in json.loads(out)]
    assert code == 0 and names == ["pendulum", "harmonic", "arclength", "poly"]


@pytest.mark.parametrize("argv", [["frobnicate"], [], ["check", "--no-such-flag"]])
def test_usage_errors_exit_1(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 1 and "usage" in err


def test_every_key_has_a_flag():
    from varineq.cli import build_parser

    help_text = build_parser()._subparsers._group_actions[0].choices["check"].format_help()
    for key in KEYS:
        assert f"--{key.replace('_', '-')}" in help_text


def test_cmd_check_direct():
    code, text = cmd_check(RunConfig.resolve({"problem": "arclength", "trajectory": "linear", "beta": 1.0, "format": "json"}))
    rep = json.loads(text)
    assert code == 0
    assert rep["residual_AC"] < 1e-9
    assert rep["residual_AB"] > 1e-7  # the two integrations by parts disagree for f_y'y'y' != 0
