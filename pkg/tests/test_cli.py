import json
import subprocess
import sys

import pytest

from cubepot.cli import main

HACKBUSCH_TEXT = ("1/120 - sqrt(2)/336 - sqrt(3)/224 + (13/560)*log(1+sqrt(2)) + (1/70)*log(1+sqrt(3))"
                  " - (1/70)*log(sqrt(2)) - (61/13440)*pi")
CUBE = "0,1;0,1;0,1"


def cli(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_trefethen_text(capsys):
    code, out, _ = cli(capsys, "force", "--q", "1,2;0,1;0,1", "--qp", CUBE, "--axis", "1")
    assert code == 0
    assert "status: elementary" in out
    assert "value: 0.925981260557" in out


def test_hackbusch_demo(capsys):
    code, out, _ = cli(capsys, "--demo", "hackbusch")
    assert code == 0
    assert f"closed form: {HACKBUSCH_TEXT}" in out


def test_twod_example(capsys):
    code, out, _ = cli(capsys, "potential", "--q", "0,1;0,1", "--qp", "0,1;0,1", "--n", "1,1", "--m", "2,2")
    assert code == 0
    assert "closed form: 1/12 - (3/40)*sqrt(2) + (19/120)*log(1+sqrt(2))" in out


def test_decimal_and_fraction_bounds(capsys):
    _, a, _ = cli(capsys, "potential", "--q", "0,0.5", "--qp", "1,3/2")
    _, b, _ = cli(capsys, "potential", "--q", "0,1/2", "--qp", "1.0,1.5")
    assert a == b and "status: elementary" in a


JSON_KEYS = {"problem", "status", "closed_form", "residuals", "value"}


@pytest.mark.parametrize("demo, status", [("hackbusch", "elementary"), ("v4", "mixed"),
                                          ("h", "numeric-only"), ("selfenergy", "elementary")])
def test_json_schema(capsys, demo, status):
    code, out, _ = cli(capsys, "--demo", demo, "--format", "json")
    assert code == 0
    d = json.loads(out)
    assert JSON_KEYS <= set(d)
    assert d["status"] == status
    assert set(d["value"]) == {"decimal", "digits"} and d["value"]["digits"] == 12
    float(d["value"]["decimal"])
    for atom in d["closed_form"]:
        assert set(atom) == {"kind", "coeff", "params"}
    for res in d["residuals"]:
        assert set(res) == {"term", "value", "error"}
    assert isinstance(d["problem"], dict) and d["problem"]["kind"]


def test_latex_output(capsys):
    code, out, _ = cli(capsys, "--demo", "twod", "--format", "latex")
    assert code == 0
    assert out.splitlines()[0] == r"\frac{1}{12} - \frac{3\sqrt{2}}{40} + \frac{19}{120}\,\log(1+\sqrt{2})"
    assert "% status: elementary" in out


@pytest.mark.parametrize("args", [
    ["potential", "--q", "0,1", "--qp", "1,2"],           # touching 1D intervals without rho
    ["potential", "--q", CUBE, "--qp", "0,1;0,1"],        # dimension mismatch
    ["potential", "--q", CUBE, "--qp", CUBE, "--n", "1,1"],
    ["force", "--q", CUBE, "--qp", CUBE],                # missing axis
    ["potential", "--q", "1,0;0,1;0,1", "--qp", CUBE],   # inverted bounds
    ["potential", "--q", "a,b", "--qp", "0,1"],
    ["potential", "--q", CUBE, "--qp", CUBE, "--rho", "1/2"],
    ["potential", "--q", CUBE, "--qp", CUBE, "--dim", "2"],
    ["potential"],
])
def test_invalid_spec_exit_code(capsys, args):
    code, out, err = cli(capsys, *args)
    assert code == 2
    assert out == "" and "invalid spec" in err


def test_divergent_exit_code(capsys):
    code, out, err = cli(capsys, "inverse-cube", "--q", CUBE, "--qp", CUBE)
    assert code == 3
    assert "diverge" in err


def test_rho_regularized_1d(capsys):
    code, out, _ = cli(capsys, "potential", "--q", "0,1", "--qp", "0,1", "--rho", "1/2")
    assert code == 0
    assert "closed form: 1 - sqrt(5) + 2*log(2+sqrt(5))" in out


def test_dump_factors(capsys):
    code, out, _ = cli(capsys, "--demo", "trefethen", "--dump", "factors")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "f1*(σ) = 2*Erf(σ)/σ - Erf(2σ)/σ"
    assert lines[1] == lines[2].replace("f3", "f2")


def test_dump_renormalized_hackbusch(capsys):
    code, out, _ = cli(capsys, "--demo", "hackbusch", "--dump", "renormalized")
    assert code == 0
    assert out.count("exp(") == 6


def test_dump_degenerate_interval(capsys):
    code, out, _ = cli(capsys, "potential", "--q", "0,0;0,1;0,1", "--qp", CUBE, "--dump", "raw")
    assert code == 0 and out.strip() == "0"


def test_waldvogel_check_demo(capsys):
    code, out, _ = cli(capsys, "--demo", "waldvogel-check")
    assert code == 0
    value = out.split("value: ")[1].split()[0]
    formula = out.split("waldvogel formula: ")[1].split()[0]
    assert value == formula


def test_subprocess_deterministic():
    cmd = [sys.executable, "-m", "cubepot", "--demo", "v4", "--format", "json"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b
    assert json.loads(a)["status"] == "mixed"


def test_subprocess_exit_codes():
    bad = subprocess.run([sys.executable, "-m", "cubepot", "potential", "--q", "0,1", "--qp", "0,1"],
                         capture_output=True, text=True)
    assert bad.returncode == 2
    div = subprocess.run([sys.executable, "-m", "cubepot", "inverse-cube", "--q", CUBE, "--qp", CUBE],
                         capture_output=True, text=True)
    assert div.returncode == 3
