"""Tests for campaigns, worst-case bookkeeping, CSV output and draw reproduction."""

import csv
import json

import pytest

from twoqubit_entanglement import harness, states, utils
from twoqubit_entanglement.checks import CheckResult
from twoqubit_entanglement.config import CampaignConfig, Tolerances
from twoqubit_entanglement.errors import IncompatibleCheck, NotPSD

CANONICAL_CHECKS = ["equivalence", "eq24-det", "eq45-dpt", "vieta", "ferrari-vs-oracle"]


def _config(**overrides):
    values = {
        "ensemble": "canonical-uniform",
        "trials": 8,
        "seed": 3,
        "checks": list(CANONICAL_CHECKS),
    }
    values.update(overrides)
    return CampaignConfig(**values)


def test_campaign_passes_and_counts_every_draw():
    report = harness.run_campaign(_config())
    assert not report.failed
    assert report.alarms == []
    for name in CANONICAL_CHECKS:
        tally = report.checks[name]
        assert tally.passed + tally.failed + tally.boundary == 8
        assert len(tally.worst) <= harness.WORST_KEEP


def test_campaign_is_deterministic():
    first = harness.run_campaign(_config())
    second = harness.run_campaign(_config())
    assert first.body() == second.body()


def test_worker_count_does_not_change_the_report():
    serial = harness.run_campaign(_config(trials=6))
    parallel = harness.run_campaign(_config(trials=6, workers=2))
    assert serial.body()["checks"] == parallel.body()["checks"]


def test_branch_notes_are_tallied():
    report = harness.run_campaign(_config(checks=["ferrari-vs-oracle"]))
    notes = report.checks["ferrari-vs-oracle"].notes
    # one note per resolvent branch that could be solved
    assert 8 <= notes.get("x2", 0) + notes.get("x4", 0) <= 24
    assert set(notes) <= {"x2", "x4", "degraded"}


def test_boundary_excess_raises_an_alarm():
    cfg = _config(checks=["equivalence"], tolerances=Tolerances(eps_sep=1.0))
    report = harness.run_campaign(cfg)
    assert report.checks["equivalence"].boundary == 8
    assert report.failed
    assert report.alarms and report.alarms[0].startswith("BoundaryExcess")


def test_incompatible_check_is_rejected_before_drawing():
    with pytest.raises(IncompatibleCheck):
        harness.run_campaign(_config(checks=["eq8-pure-pt"]))


def test_report_serializes(tmp_path):
    report = harness.run_campaign(_config(trials=3))
    path = tmp_path / "out" / "report.json"
    utils.write_json(str(path), report.as_dict())
    data = json.loads(path.read_text())
    assert data["config"]["seed"] == 3
    assert data["failed"] is False
    assert "wall_time" in data


def test_csv_output(tmp_path):
    path = tmp_path / "draws.csv"
    harness.run_campaign(_config(trials=5), csv_path=str(path))
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        rows = list(reader)
    assert reader.fieldnames == harness.CSV_FIELDS
    assert [int(r["index"]) for r in rows] == list(range(5))
    assert all(r["verdict"] in ("separable", "inseparable", "boundary") for r in rows)


def test_worst_cases_order_failures_first():
    tally = harness.CheckTally("vieta")
    for index, (status, residual) in enumerate(
        [("pass", 1e-12), ("fail", 1e-6), ("pass", 1e-10), ("fail", 1e-3), ("pass", 1e-11),
         ("pass", 1e-9), ("boundary", None)]
    ):
        tally.add(CheckResult("vieta", status, residual), seed=0, index=index)
    assert (tally.passed, tally.failed, tally.boundary) == (4, 2, 1)
    assert [case.index for case in tally.worst] == [3, 1, 6, 5, 2]


def test_reproduce_matches_the_campaign():
    cfg = _config(checks=["vieta"])
    outcome = harness.evaluate_draw(cfg, 4)
    trace = harness.reproduce(3, 4, "vieta", "canonical-uniform")
    assert trace["check"]["status"] == outcome.results[0].status
    assert trace["check"]["residual"] == outcome.results[0].residual
    assert trace["index"] == 4 and trace["seed"] == 3
    assert trace["errors"] == {}


def test_trace_of_bell_state():
    trace = harness.trace_state(states.bell_state())
    assert trace["concurrence"] == pytest.approx(1.0)
    assert trace["det_pt"] == pytest.approx(-1 / 16)
    assert trace["verdict"] == "inseparable"
    assert trace["D"] == pytest.approx(1 / 16)
    assert trace["delta"] == pytest.approx(1.0)
    assert trace["errors"] == {}
    # numpy and complex intermediates must encode cleanly
    json.loads(utils.to_json(trace))


@pytest.mark.parametrize("ensemble", ["canonical-uniform", "ginibre-rank-4"])
def test_canonical_checks_hold_over_a_thousand_draws(ensemble):
    cfg = _config(
        ensemble=ensemble,
        trials=1000,
        seed=1,
        checks=["lu-invariance", "eq24-det", "eq45-dpt"],
    )
    report = harness.run_campaign(cfg)
    for name in cfg.checks:
        assert report.checks[name].failed == 0, report.checks[name].worst


def test_input_errors_inside_a_check_count_as_failures(monkeypatch):
    def raises(ctx):
        raise NotPSD("Matrix has a negative eigenvalue", residual=-1e-9, limit=-1e-10)

    monkeypatch.setitem(harness.CHECKS, "vieta", raises)
    report = harness.run_campaign(_config(trials=3, checks=["vieta"]))
    tally = report.checks["vieta"]
    assert tally.failed == 3
    assert tally.worst[0].message.startswith("NotPSD")


def test_rank_three_campaign_completes():
    cfg = _config(ensemble="ginibre-rank-3", trials=200, seed=1, checks=["ferrari-vs-oracle"])
    report = harness.run_campaign(cfg)
    tally = report.checks["ferrari-vs-oracle"]
    assert tally.passed + tally.failed + tally.boundary == 200
