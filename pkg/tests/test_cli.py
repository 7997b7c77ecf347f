import csv
import io
import json
import math

import numpy as np
import pytest
from scipy.integrate import trapezoid
from scipy.stats import kstest

from oxg import cli, core
from oxg.baselines import Baseline
from oxg.core import OxgParams
from oxg.datasets import builtin
from oxg.mle import FitOptions, fit


def run(capsys, *argv):
    code = cli.run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fit_glass_fibres(capsys):
    code, out, _ = run(capsys, "fit", "--data", "glass-fibres", "--baseline", "exponential")
    assert code == 0
    body = json.loads(out)
    assert {"params", "log_likelihood", "aic", "converged", "iterations"} <= set(body)
    assert body["aic"] == pytest.approx(32.092, abs=0.02)
    assert body["converged"] is True


def test_fit_not_converged_exits_4(capsys, monkeypatch):
    monkeypatch.setattr(cli, "fit", lambda data, kind: fit(data, kind, FitOptions(max_iterations=2)))
    code, out, _ = run(capsys, "fit", "--data", "glass-fibres")
    assert code == 4
    body = json.loads(out)
    assert body["converged"] is False
    assert {"params", "log_likelihood", "aic", "converged", "iterations"} <= set(body)


def test_quantile_round_trip(capsys):
    code, out, _ = run(capsys, "quantile", "--u", "0.5", "--lambda", "1", "--baseline", "exponential", "--theta", "1")
    assert code == 0
    body = json.loads(out)
    assert body["check"][0] == pytest.approx(0.5, abs=1e-9)
    p = OxgParams(1.0, Baseline("exponential", (1.0,)))
    assert core.cdf(p, body["x"][0]) == pytest.approx(0.5, abs=1e-9)


def test_reliability_identical(capsys):
    code, out, _ = run(capsys, "reliability", "--lambda1", "1", "--lambda2", "1", "--baseline", "exponential", "--theta", "1")
    assert code == 0
    assert json.loads(out)["R"] == pytest.approx(0.5, abs=1e-10)


def test_json_numbers_round_trip(capsys):
    _, out, _ = run(capsys, "eval", "--x", "0.3", "--lambda", "0.7", "--theta", "1.1")
    body = json.loads(out)
    p = OxgParams(0.7, Baseline("exponential", (1.1,)))
    assert body["pdf"][0] == core.pdf(p, 0.3)
    assert body["cdf"][0] == core.cdf(p, 0.3)


def test_sample_output_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(capsys, "sample", "--lambda", "1", "--theta", "1", "--n", "500", "--seed", "9", "--out", str(path))[0] == 0
    assert a.read_bytes() == b.read_bytes()
    rows = list(csv.reader(io.StringIO(a.read_text())))
    assert rows[0] == ["x"] and len(rows) == 501
    expected = core.sample(OxgParams(1.0, Baseline("exponential", (1.0,))), 500, seed=9)
    assert np.array_equal(np.array([float(r[0]) for r in rows[1:]]), expected)


def test_plot_data_grid(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    code, _, _ = run(capsys, "plot-data", "--data", "glass-fibres", "--out", str(out))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 512
    x = np.array([float(r["x"]) for r in rows])
    pdf = np.array([float(r["pdf"]) for r in rows])
    F = np.array([float(r["cdf"]) for r in rows])
    assert np.all(np.diff(x) > 0)
    assert np.all(np.isfinite(pdf)) and np.all(pdf >= 0)
    assert np.all(np.diff(F) >= 0)
    assert trapezoid(pdf, x) == pytest.approx(1.0, abs=1e-3)
    assert set(rows[0]) == {"x", "pdf", "cdf", "survival", "hazard", "reversed_hazard"}
    hist = list(csv.DictReader(io.StringIO((tmp_path / "grid.hist.csv").read_text())))
    assert sum(int(r["count"]) for r in hist) == 63


def test_plot_data_json_for_given_params(capsys):
    code, out, _ = run(capsys, "plot-data", "--lambda", "2", "--baseline", "uniform", "--theta", "1", "--format", "json")
    assert code == 0
    grid = json.loads(out)["grid"]
    assert len(grid["x"]) == 512
    assert trapezoid(grid["pdf"], grid["x"]) == pytest.approx(1.0, abs=1e-3)


def test_gof_ks_matches_scipy(capsys):
    code, out, _ = run(capsys, "gof", "--data", "indometh", "--lambda", "16.80083", "--theta", "0.1050095")
    assert code == 0
    body = json.loads(out)
    p = OxgParams(16.80083, Baseline("exponential", (0.1050095,)))
    data = builtin("indometh").values
    assert body["ks_statistic"] == pytest.approx(kstest(data, lambda v: core.cdf(p, v)).statistic, abs=1e-15)
    assert body["log_likelihood"] == pytest.approx(-31.341, abs=0.01)


def test_datasets_listing(capsys):
    code, out, _ = run(capsys, "datasets")
    assert code == 0
    listing = {d["name"]: d for d in json.loads(out)["datasets"]}
    assert listing["glass-fibres"]["n"] == 63
    assert listing["indometh"]["min"] == 0.05


@pytest.mark.parametrize(
    "argv",
    [
        ["moments", "--lambda", "1", "--baseline", "uniform", "--theta", "1", "--t", "0.5", "--r", "1"],
        ["entropy", "--lambda", "1", "--theta", "1", "--beta", "2"],
        ["order-stat", "--lambda", "1", "--theta", "1", "--r", "2", "--n", "3", "--x", "0.5", "1.0"],
        ["order-stat", "--lambda", "0.3", "--baseline", "uniform", "--theta", "1", "--r", "1", "--n", "2",
         "--x", "0.5", "--method", "series"],
        ["residual", "--lambda", "1", "--theta", "1", "--r", "1", "--t", "0.5"],
        ["eval", "--lambda", "1", "--baseline", "burr-xii", "--alpha", "2", "--theta", "3", "--x", "0.5", "--format", "csv"],
        ["eval", "--lambda", "1", "--baseline", "normal", "--mu", "0", "--sigma", "1", "--x", "-1", "1"],
        ["datasets", "--data", "indometh", "--format", "csv"],
    ],
)
def test_other_commands_succeed(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    assert out


def test_usage_errors_exit_2(capsys):
    code, _, err = run(capsys, "eval", "--x", "1")
    assert code == 2
    assert json.loads(err)["error"] == "usage"
    assert run(capsys, "nonsense")[0] == 2
    assert run(capsys, "quantile", "--u", "1.5", "--lambda", "1", "--theta", "1")[0] == 2
    assert run(capsys, "moments", "--lambda", "1", "--theta", "1", "--format", "csv")[0] == 2


def test_data_errors_exit_3(capsys, tmp_path):
    code, _, err = run(capsys, "fit", "--data", str(tmp_path / "missing.csv"))
    assert code == 3
    assert "missing.csv" in json.loads(err)["message"]
    bad = tmp_path / "bad.csv"
    bad.write_text("1.0\n2.0 x\n")
    code, _, err = run(capsys, "fit", "--data", str(bad))
    assert code == 3 and "line 2, column 5" in json.loads(err)["message"]
    neg = tmp_path / "neg.csv"
    neg.write_text("1 -2 3\n")
    code, _, err = run(capsys, "fit", "--data", str(neg))
    assert code == 3 and json.loads(err)["index"] == 1


def test_series_non_convergence_exits_4(capsys):
    code, _, err = run(capsys, "moments", "--lambda", "1", "--baseline", "uniform", "--theta", "1", "--method", "series")
    assert code == 4
    body = json.loads(err)
    assert body["error"] == "NonConvergenceError" and math.isfinite(body["value"])


def test_main_exits_with_status():
    with pytest.raises(SystemExit) as info:
        cli.main(["datasets"])
    assert info.value.code == 0


def test_dumps_is_stable():
    text = cli.dumps({"b": [1.0, -0.0, math.nan], "a": True, "c": "q\"x"})
    assert text == '{\n  "a": true,\n  "b": [\n    1,\n    0,\n    null\n  ],\n  "c": "q\\"x"\n}'
    assert cli.dumps(0.1) == "0.10000000000000001"
