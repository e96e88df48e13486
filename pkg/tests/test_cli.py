import json

import numpy as np
import pytest

from paircop import pcc
from paircop.cli import main
from paircop.errors import ConvergenceError

CLAYTON3 = {
    "type": "pcc", "dim": 3, "order": [2, 1, 3],
    "edges": [
        {"conditioned": [2, 1], "conditioning": [], "family": "clayton",
         "params": {"constant": [2.0]}},
        {"conditioned": [2, 3], "conditioning": [], "family": "clayton",
         "params": {"constant": [2.0]}},
        {"conditioned": [1, 3], "conditioning": [2], "family": "clayton",
         "params": {"constant": [2.0 / 3.0]}},
    ],
}

GUMBEL3 = {"type": "archimedean", "family": "gumbel", "theta": 2.0, "dim": 3}


@pytest.fixture
def clayton_spec(tmp_path):
    p = tmp_path / "clayton3.json"
    p.write_text(json.dumps(CLAYTON3))
    return str(p)


@pytest.fixture
def gumbel_spec(tmp_path):
    p = tmp_path / "gumbel3.json"
    p.write_text(json.dumps(GUMBEL3))
    return str(p)


def test_tau_subcommand(capsys):
    assert main(["tau", "--family", "gaussian", "--rho", "0.5"]) == 0
    out = capsys.readouterr().out.strip()
    assert float(out) == pytest.approx(1.0 / 3.0, abs=1e-15)
    assert main(["tau", "--family", "clayton", "--theta", "2.0"]) == 0
    assert float(capsys.readouterr().out) == 0.5
    assert main(["tau", "--family", "studentt", "--params", "0.5,4"]) == 0
    assert float(capsys.readouterr().out) == pytest.approx(1.0 / 3.0)


def test_sample_deterministic_csv(clayton_spec, capsys):
    assert main(["sample", "--spec", clayton_spec, "--n", "50",
                 "--seed", "42"]) == 0
    first = capsys.readouterr().out
    assert main(["sample", "--spec", clayton_spec, "--n", "50",
                 "--seed", "42"]) == 0
    second = capsys.readouterr().out
    assert first == second
    lines = first.strip().split("\n")
    assert lines[0] == "u1,u2,u3"
    assert len(lines) == 51
    # shortest-roundtrip floats: parsing back reproduces the library values
    vals = np.array([[float(x) for x in ln.split(",")] for ln in lines[1:]])
    spec = pcc.PccSpec.from_dict(CLAYTON3)
    want = pcc.pcc_sample(spec, 50, 42)
    assert np.array_equal(vals, want)


def test_sample_requires_seed(clayton_spec, capsys):
    assert main(["sample", "--spec", clayton_spec, "--n", "10"]) == 2
    capsys.readouterr()


def test_unknown_flag_rejected(clayton_spec, capsys):
    assert main(["sample", "--spec", clayton_spec, "--n", "10",
                 "--seed", "1", "--bogus", "2"]) == 2
    capsys.readouterr()


def test_density_subcommand(clayton_spec, capsys):
    assert main(["density", "--spec", clayton_spec,
                 "--point", "0.3,0.5,0.7", "--point", "0.5,0.5,0.5"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "u1,u2,u3,density"
    spec = pcc.PccSpec.from_dict(CLAYTON3)
    want = float(pcc.pcc_density(spec, np.array([0.3, 0.5, 0.7])))
    assert float(lines[1].split(",")[-1]) == pytest.approx(want, rel=1e-15)


def test_check_simplified_report(gumbel_spec, tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main(["check-simplified", "--spec", gumbel_spec,
                 "--cond-grid", "3", "--grid", "21", "--mesh", "801",
                 "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["tool_version"]
    assert report["spec"] == GUMBEL3
    assert report["max_pairwise_sup_deviation"] > 5e-3
    assert len(report["cond_grid"]) == 3


def test_cond_copula_csv(gumbel_spec, capsys):
    assert main(["cond-copula", "--spec", gumbel_spec, "--cond-value", "0.5",
                 "--grid", "11", "--mesh", "401"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "v1,v2,value"
    assert len(lines) == 1 + 11 * 11


def test_mixture_check(capsys):
    assert main(["mixture-check", "--mixing", "gamma", "--params", "1.5,1.5",
                 "--d", "3", "--t-grid", "0:5:5", "--variant", "e4"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["profiles"]["e4"]["relative_spread"] < 1e-6


def test_mo_grid(capsys):
    assert main(["mo-grid", "--lam", "2.0", "--u3", "0.08",
                 "--grid", "5"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "v1,v2,value,unique"
    assert len(lines) == 26
    assert lines[1].split(",")[3] in ("true", "false")


def test_validation_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["sample", "--spec", str(bad), "--n", "5", "--seed", "1"]) == 2
    err = capsys.readouterr().err
    assert "malformed" in err
    missing = tmp_path / "missing.json"
    assert main(["density", "--spec", str(missing), "--point", "0.5,0.5,0.5"]) == 2
    capsys.readouterr()
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"type": "pcc", "dim": 3, "order": [2, 1, 3],
                                 "edges": []}))
    assert main(["density", "--spec", str(wrong),
                 "--point", "0.5,0.5,0.5"]) == 2
    capsys.readouterr()
    out_of_range = dict(CLAYTON3)
    out_of_range["edges"] = json.loads(json.dumps(CLAYTON3["edges"]))
    out_of_range["edges"][0]["params"]["constant"] = [-5.0]
    p = tmp_path / "range.json"
    p.write_text(json.dumps(out_of_range))
    assert main(["sample", "--spec", str(p), "--n", "5", "--seed", "1"]) == 2
    err = capsys.readouterr().err
    assert "edges[0]" in err


def test_numerical_failure_exit_1(gumbel_spec, capsys, monkeypatch):
    def boom(*a, **kw):
        raise ConvergenceError("quadrature blew up")

    monkeypatch.setattr(pcc, "simplified_assumption_check", boom)
    assert main(["check-simplified", "--spec", gumbel_spec]) == 1
    assert "quadrature blew up" in capsys.readouterr().err
