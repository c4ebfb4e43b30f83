"""End-to-end smoke tests for the Python bindings.

Frozen values below are for the HEIS5 chart (gamma = (-x2, 0, -x4, 0)) with
the CURV5 energy exp(2 x2) v1^2 + v2^2 + v3^2 + v4^2, evaluated at the origin
with v = e1; they match the C++ unit suite.
"""

import json
import math
import pathlib

import pytest

import wagner

ORIGIN = [0.0, 0.0, 0.0, 0.0, 0.0]
E1 = [1.0, 0.0, 0.0, 0.0]

MANIFESTS = pathlib.Path(__file__).resolve().parents[2] / "manifests"


@pytest.fixture(scope="module")
def curved_solver():
    chart = wagner.Chart.preset("HEIS5")
    metric = wagner.Metric.preset("CURV5", m=2)
    return wagner.Solver(chart, metric)


def test_chart_and_metric_basics():
    chart = wagner.Chart.preset("HEIS5")
    assert chart.m == 2
    assert chart.dim == 5
    assert chart.gamma == ["-x2", "0", "-x4", "0"]
    omega = chart.omega(ORIGIN)
    assert omega["lower"][0][1] == 1.0
    assert omega["lower"][1][0] == -1.0
    assert chart.reeb_defect(ORIGIN) == [0.0, 0.0, 0.0, 0.0]

    metric = wagner.Metric("v1^2 + v2^2 + v3^2 + v4^2", m=2, label="flat")
    assert metric.label == "flat"


def test_frozen_curvature_values(curved_solver):
    ev = curved_solver.evaluate(ORIGIN, E1, depth="curvature")
    assert ev["F"] == pytest.approx(1.0)
    assert ev["K"][1][0][1] == pytest.approx(-1.0, abs=1e-12)
    assert ev["G_n"][1] == pytest.approx(-2.0, abs=1e-12)
    assert ev["R_hor"][1][0][1] == pytest.approx(1.0, abs=1e-12)
    assert ev["R_mixed"][1][1] == pytest.approx(2.0, abs=1e-12)
    assert max(abs(c) for row in ev["P"] for c in row) <= 1e-12
    assert abs(ev["reeb_residual"]) <= 1e-12
    assert max(abs(r) for r in ev["metrizability"]) <= 1e-12


def test_depth_gating(curved_solver):
    shallow = curved_solver.evaluate(ORIGIN, E1, depth="metric")
    assert "spray" not in shallow
    assert "K" not in shallow
    mid = curved_solver.evaluate(ORIGIN, E1, depth="spray")
    assert mid["G"][0][1] == pytest.approx(1.0, abs=1e-12)
    assert "R_mixed" not in mid


def test_bracket_oracle(curved_solver):
    out = curved_solver.brackets([0.3, -0.2, 0.1, 0.4, -0.5],
                                 [1.0, 0.25, -0.5, 0.75])
    assert len(out["samples"]) == 10
    assert out["max_r_deviation"] <= 1e-6
    assert out["max_q_residual"] <= 1e-6
    kinds = {(s["a"], s["b"]) for s in out["samples"]}
    assert (1, -1) in kinds  # vertical bracket against the extended field
    assert (1, 2) in kinds


def test_flatness_classification():
    chart = wagner.Chart.preset("HEIS5")
    flat = wagner.Solver(chart, wagner.Metric.preset("F_EUC", m=2))
    pts = [(ORIGIN, E1), ([0.5, -0.25, 0.75, 0.1, -0.4], [1.0, 2.0, -1.0, 0.5])]
    scan = flat.flatness(pts)
    assert scan["flat"] is True
    assert scan["points"] == 2

    curved = wagner.Solver(chart, wagner.Metric.preset("CURV5", m=2))
    scan = curved.flatness(pts)
    assert scan["flat"] is False
    assert scan["max_abs"] > 0.1
    assert len(scan["argmax_x"]) == 5


def test_transport_conserves_energy():
    chart = wagner.Chart.preset("HEIS5")
    solver = wagner.Solver(chart, wagner.Metric.preset("WARP5", m=2))
    out = solver.transport(
        ["cos(t) - 1", "sin(t)", "0", "0", "sin(2*t)/4 - t/2"],
        t0=0.0, t1=2.0 * math.pi, steps=1000,
        v0=[1.0, 0.5, -0.3, 0.2], mode="interior", with_trace=True)
    assert out["F_drift"] <= 1e-8
    assert out["max_defect"] <= 1e-10
    assert len(out["trace"]) == 1001
    assert out["trace"][0]["t"] == 0.0
    assert out["v_final"] == out["trace"][-1]["v"]


def test_error_translation():
    with pytest.raises(ValueError):
        wagner.Chart.preset("NOPE")
    with pytest.raises(ValueError):
        wagner.Chart(1, ["0", "0"])  # m = 1 needs allow_m1
    chart = wagner.Chart.preset("HEIS5")
    solver = wagner.Solver(chart, wagner.Metric.preset("CURV5", m=2))
    with pytest.raises(ValueError):
        solver.evaluate(ORIGIN, E1, depth="everything")
    with pytest.raises(ValueError):
        solver.brackets(ORIGIN, E1, fd_step=1e-12)


def test_run_eval_is_deterministic():
    manifest = (MANIFESTS / "regression.json").read_text()
    first = wagner.run("eval", manifest)
    second = wagner.run("eval", manifest)
    assert first["exit_code"] == 0
    assert first["report_json"] == second["report_json"]
    report = json.loads(first["report_json"])
    assert report["command"] == "eval"
    assert report["pass"] is True
    frozen = report["points"][0]
    assert frozen["K"][1][0][1] == -1.0
    assert frozen["R_mixed"][1][1] == 2.0


def test_run_transport_emits_csv():
    manifest = (MANIFESTS / "transport_circle.json").read_text()
    out = wagner.run("transport", manifest)
    assert out["exit_code"] == 0
    assert "circle_lift.csv" in out["csv"]
    body = out["csv"]["circle_lift.csv"].decode()
    assert body.startswith("t,x1,")
