"""End-to-end checks of the command-line front end.

Everything goes through cli.run directly so the exit-status contract is
what gets exercised, not a subprocess harness.
"""

import json

import pytest

from repairchain import cli

GEO_HALF = '{"family": "geometric", "p": 0.5}'
GEO_QUARTER = '{"family": "geometric", "p": 0.25}'
GEO_THREE_QUARTER = '{"family": "geometric", "p": 0.75}'
POWER_ZETA_3 = '{"family": "power_zeta", "alpha": 3.0}'


def run_json(capsys, argv):
    status = cli.run(argv)
    captured = capsys.readouterr()
    assert status == 0, captured.err
    return json.loads(captured.out)


def run_lines(capsys, argv):
    status = cli.run(argv)
    captured = capsys.readouterr()
    assert status == 0, captured.err
    return captured.out.splitlines()


# ---------------------------------------------------------------------------
# happy paths, one per verb


def test_classify(capsys):
    rec = run_json(capsys, ["classify", "-m", GEO_HALF])
    assert rec == {"class": "null_recurrent", "mu": 1.0}
    rec = run_json(capsys, ["classify", "-m", GEO_QUARTER])
    assert rec["class"] == "transient"
    assert rec["mu"] == pytest.approx(3.0)


def test_pmf_json(capsys):
    rec = run_json(capsys, ["pmf", "-m", GEO_HALF, "-N", "8"])
    assert rec["N"] == 8
    assert len(rec["f"]) == 9 and len(rec["u"]) == 9
    assert rec["f"][0] == 0.0
    assert rec["f"][1] == 0.5
    assert rec["u"][0] == 1.0
    assert rec["return_prob"] == pytest.approx(1.0)


def test_pmf_csv(capsys):
    lines = run_lines(capsys, ["pmf", "--tau", "-m", GEO_HALF, "-N", "4", "--csv"])
    assert lines[0] == "n,f_n,u_n"
    assert len(lines) == 6  # header plus n = 0..4
    assert lines[1] == "0,0.0,1.0"
    assert lines[2] == "1,0.5,0.5"


def test_pmf_exit_variant(capsys):
    rec = run_json(capsys, ["pmf", "--exit", "-m", GEO_QUARTER, "-N", "4"])
    assert rec["q_exit"] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert rec["pmf"][0] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert rec["pmf"][1] == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_decay_closed_forms(capsys):
    rec = run_json(capsys, ["decay", "-m", GEO_QUARTER])
    assert rec["case"] == "TransientTilt"
    assert rec["x0"] == pytest.approx(2.0 / 3.0, abs=1e-10)
    assert rec["R0"] == pytest.approx(4.0 / 3.0, abs=1e-10)
    assert rec["R1"] == pytest.approx(4.0 / 3.0, abs=1e-10)
    assert rec["F_at_R1"] == pytest.approx(2.0 / 3.0, abs=1e-9)


def test_decay_null_tangency_point(capsys):
    # recurrent law with radius 1: no interior tangency, x0 serializes as null
    rec = run_json(capsys, ["decay", "-m", POWER_ZETA_3])
    assert rec["x0"] is None
    assert rec["R0"] == 1.0 and rec["R1"] == 1.0
    assert rec["case"] == "CriticalRadiusOne"


def test_tilt_default_point(capsys):
    rec = run_json(capsys, ["tilt", "-m", GEO_QUARTER])
    assert rec["x"] == pytest.approx(2.0 / 3.0, abs=1e-10)
    assert rec["mu"] == pytest.approx(1.0, abs=1e-10)
    assert rec["a_head"][0] == pytest.approx(0.5, abs=1e-12)
    assert rec["a_head"][3] == pytest.approx(2.0 ** -4, abs=1e-12)


def test_moments_exact_mean(capsys):
    rec = run_json(capsys, ["moments", "-m", GEO_THREE_QUARTER, "-k", "1"])
    assert rec["value"] == 1.5
    assert rec["flag"] == "exact"
    assert rec["tail_bound"] == 0.0


def test_finite_verdicts(capsys):
    rec = run_json(capsys, ["finite", "-m", GEO_HALF, "--alpha", "0.4"])
    assert rec["verdict"] == "Finite"
    rec = run_json(capsys, ["finite", "-m", GEO_HALF, "--alpha", "0.6"])
    assert rec["verdict"] == "Infinite"
    rec = run_json(capsys,
                   ["finite", "-m", GEO_QUARTER, "--alpha", "0.5", "--r1-weighted"])
    assert "R1^tau" in rec["quantity"]
    assert "tau<inf" in rec["quantity"]


def test_exit_weighted_verdicts(capsys):
    rec = run_json(capsys, ["exit", "-m", GEO_QUARTER, "-k", "0"])
    assert rec["verdict"] == "Finite"
    rec = run_json(capsys, ["exit", "-m", GEO_QUARTER, "--alpha", "0.6"])
    assert rec["verdict"] == "Infinite"


def test_exit_pmf_csv(capsys):
    lines = run_lines(capsys, ["exit", "-m", GEO_QUARTER, "-N", "4", "--csv"])
    assert lines[0] == "n,P_L_n"
    assert len(lines) == 6
    assert lines[1].startswith("0,0.6666666666666")


def test_simulate_tau(capsys):
    argv = ["simulate", "-m", GEO_HALF,
            "--samples", "2000", "--seed", "7", "--cap", "64"]
    rec = run_json(capsys, argv)
    assert rec["samples"] == 2000 and rec["seed"] == 7 and rec["cap"] == 64
    assert sum(rec["tau_hist"].values()) + rec["censored"] == 2000
    # byte-identical rerun: the serializer leaves no room for dict-order
    # or float-formatting drift
    first = cli.run(argv), capsys.readouterr().out
    second = cli.run(argv), capsys.readouterr().out
    assert first == second


def test_simulate_exit(capsys):
    rec = run_json(capsys, ["simulate", "--exit", "-m", GEO_QUARTER,
                            "--samples", "1500", "--seed", "3", "--horizon", "300"])
    assert rec["horizon"] == 300
    assert sum(rec["L_hist"].values()) == 1500
    assert rec["censored"] >= 0


def test_asym(capsys):
    rec = run_json(capsys, ["asym", "-m", GEO_HALF])
    assert rec == {"gamma": 0.5, "method": "analytic"}
    rec = run_json(capsys, ["asym", "-m", GEO_HALF, "--fitted"])
    assert rec["method"] == "fitted"
    assert abs(rec["gamma"] - 0.5) < 0.02


def test_model_from_file(tmp_path, capsys):
    path = tmp_path / "model.json"
    path.write_text(GEO_THREE_QUARTER, encoding="utf-8")
    rec = run_json(capsys, ["classify", "-m", f"@{path}"])
    assert rec["class"] == "positive_recurrent"


def test_help_exits_zero(capsys):
    assert cli.run(["--help"]) == 0
    assert "classify" in capsys.readouterr().out


# ---------------------------------------------------------------------------
# exit-status contract: 1 usage, 2 bad spec, 3 domain

USAGE_CASES = [
    ["pmf", "-m", GEO_HALF, "-N", "0"],
    ["pmf", "-m", GEO_HALF, "--tau", "--exit"],
    ["classify"],
    ["frobnicate", "-m", GEO_HALF],
    ["tilt", "-m", GEO_QUARTER, "--x", "-1.0"],
    ["moments", "-m", GEO_THREE_QUARTER, "-k", "0"],
    ["finite", "-m", GEO_HALF, "--alpha", "-0.5"],
    ["exit", "-m", GEO_QUARTER, "-k", "-2"],
    ["simulate", "-m", GEO_HALF, "--samples", "0"],
    ["simulate", "-m", GEO_HALF, "--cap", "0"],
    ["simulate", "--exit", "-m", GEO_QUARTER, "--horizon", "0"],
]


@pytest.mark.parametrize("argv", USAGE_CASES, ids=lambda a: " ".join(a))
def test_usage_errors(capsys, argv):
    assert cli.run(argv) == 1
    assert capsys.readouterr().err != ""


SPEC_CASES = [
    ["classify", "-m", '{"family": "weibull"}'],
    ["classify", "-m", "{not json"],
    ["classify", "-m", "@/no/such/file.json"],
    ["classify", "-m", '{"family": "explicit", "coeffs": [0.5, 0.2, 0.3]}'],
    ["classify", "-m", '{"family": "geometric", "p": 1.5}'],
]


@pytest.mark.parametrize("argv", SPEC_CASES, ids=lambda a: a[-1][:30])
def test_spec_errors(capsys, argv):
    assert cli.run(argv) == 2
    assert "invalid model spec" in capsys.readouterr().err


DOMAIN_CASES = [
    ["exit", "-m", GEO_HALF],                      # last exit needs transience
    ["pmf", "--exit", "-m", GEO_THREE_QUARTER],
    ["asym", "-m", GEO_THREE_QUARTER],             # exponent needs criticality
    ["moments", "-m", GEO_QUARTER],                # moments need a finite mean
    ["tilt", "-m", POWER_ZETA_3],                  # no tangency point at radius 1
    ["tilt", "-m", POWER_ZETA_3, "--x", "3.0"],    # outside the radius
    ["simulate", "--exit", "-m", GEO_HALF],
]


@pytest.mark.parametrize("argv", DOMAIN_CASES, ids=lambda a: " ".join(a))
def test_domain_errors(capsys, argv):
    assert cli.run(argv) == 3
    assert "domain error" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# float serialization


@pytest.mark.parametrize("value,text", [
    (1.0, "1.0"),
    (0.5, "0.5"),
    (2.0 / 3.0, "0.66666666666666663"),
    (float("inf"), "Infinity"),
    (float("nan"), "NaN"),
    (1e-300, "1e-300"),
])
def test_float_format(value, text):
    assert cli._fmt_float(value) == text


def test_stdout_is_parseable_json_with_ints_kept(capsys):
    # the classify record writes mu = 1.0 with the trailing ".0", while
    # counts stay bare ints
    status = cli.run(["classify", "-m", GEO_HALF])
    raw = capsys.readouterr().out
    assert status == 0
    assert '"mu": 1.0' in raw
