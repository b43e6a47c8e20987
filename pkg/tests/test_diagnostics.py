import csv
import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from legflow.diagnostics import (
    IdentityReport,
    conservation_suite,
    minkowski_integrand,
    minkowski_residual,
    reports_to_csv,
    summarize,
    total_curvature,
    vertical_identity_residual,
)
from legflow.flow3d import rescale_trajectory
from legflow.heis_core import legendrian_lift
from legflow.imcf_planar import support_to_curve
from legflow.planar import PlanarCurve
from legflow.shapes import circle, h0_cos2
from legflow.trajectory import FlowTrajectory

TWO_PI = 2 * np.pi


def test_report_pass_logic():
    assert IdentityReport("a", 1e-9, 1e-8).passed
    assert not IdentityReport("a", -2e-8, 1e-8).passed
    assert IdentityReport("tc", 6.2831853, 1e-6, target=TWO_PI).passed
    assert not IdentityReport("x", np.nan, 1.0).passed


def test_minkowski_integrand_vanishes_on_centered_circle(unit_circle_lift):
    assert np.max(np.abs(minkowski_integrand(unit_circle_lift))) < 1e-10


def test_minkowski_on_h0_and_classical_length(h0_lift):
    L = h0_lift.length
    assert abs(minkowski_residual(h0_lift)) <= 1e-6 * L
    # classical Minkowski: L = int h dtheta = 2 pi a_0
    assert L == pytest.approx(TWO_PI, rel=1e-12)


def test_minkowski_on_translated_circle(test_corpus):
    c = test_corpus["translated_circle"]
    assert abs(minkowski_residual(c)) <= 1e-6 * c.length
    # the pointwise integrand does not vanish there, only its integral
    assert np.max(np.abs(minkowski_integrand(c))) > 0.1


def test_total_curvature_examples(h0_lift):
    assert total_curvature(circle(256)) == pytest.approx(TWO_PI, abs=1e-10)
    assert total_curvature(h0_lift) == pytest.approx(TWO_PI, abs=1e-8)
    u = 2 * TWO_PI * np.arange(256) / 256
    twice = PlanarCurve(np.column_stack([np.cos(u), np.sin(u)]))
    assert total_curvature(twice) == pytest.approx(2 * TWO_PI, abs=1e-10)


def test_vertical_identity(test_corpus):
    for c in test_corpus.values():
        assert vertical_identity_residual(c) <= 1e-8 * max(1, c.length)


def test_vertical_identity_detects_non_legendrian():
    lift = legendrian_lift(circle(64))
    bent = type(lift)(lift.points + np.column_stack([0 * lift.x, 0 * lift.x, 0.1 * lift.x]), lift.vertical_holonomy)
    assert vertical_identity_residual(bent) > 1e-3


def test_suite_on_circle_runs(circle_run):
    for traj in (circle_run, rescale_trajectory(circle_run)):
        reports = conservation_suite(traj, curve_id="circle")
        assert all(r.passed for r in reports), summarize(reports)
        assert {r.curve_id for r in reports} == {"circle"}
    names = {r.name for r in conservation_suite(rescale_trajectory(circle_run))}
    assert {"length_constant", "length_derivative", "minkowski", "total_curvature"} <= names


def test_suite_tolerances(circle_run):
    reports = conservation_suite(circle_run)
    law = [r for r in reports if r.name == "length_law"]
    assert len(law) == len(circle_run) and all(r.tolerance == 1e-3 for r in law)
    tc = [r for r in reports if r.name == "total_curvature"]
    assert all(r.target == pytest.approx(TWO_PI) and r.tolerance == 1e-6 for r in tc)


def test_suite_rejects_unknown_kind(circle_run):
    with pytest.raises(ValueError):
        conservation_suite(circle_run, kind="shrinking")


def test_suite_detects_broken_length_law(circle_run):
    diags = [dict(d, length=d["length"] * (1 + 0.01 * i)) for i, d in enumerate(circle_run.diagnostics)]
    fake = FlowTrajectory(circle_run.times, circle_run.states, diags)
    assert not all(r.passed for r in conservation_suite(fake) if r.name == "length_law")


def test_csv_and_summary():
    reports = [
        IdentityReport("minkowski", 1e-12, 1e-6, time=0.0, curve_id="c"),
        IdentityReport("minkowski", 5e-6, 1e-6, time=1.0, curve_id="c"),
    ]
    text = reports_to_csv(reports)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert [r["passed"] for r in rows] == ["pass", "FAIL"]
    assert float(rows[1]["value"]) == 5e-6
    line = summarize(reports)
    assert line.startswith("FAIL minkowski") and "1/2" in line


coef = st.floats(-0.06, 0.06, allow_nan=False)


@settings(max_examples=20, deadline=None)
@given(
    a=st.lists(coef, min_size=3, max_size=3),
    b=st.lists(coef, min_size=3, max_size=3),
    shift=st.tuples(st.floats(-4, 4), st.floats(-4, 4)),
    z0=st.floats(-2, 2),
)
def test_minkowski_vanishes_for_random_curves(a, b, shift, z0):
    u = TWO_PI * np.arange(256) / 256
    r = 1 + sum(a[m] * np.cos((m + 2) * u) + b[m] * np.sin((m + 2) * u) for m in range(3))
    proj = PlanarCurve(np.column_stack([shift[0] + r * np.cos(u), shift[1] + r * np.sin(u)]))
    lift = legendrian_lift(proj, z0)
    assert abs(minkowski_residual(lift)) <= 1e-6 * lift.length
    assert total_curvature(lift) == pytest.approx(TWO_PI, abs=1e-8)


def test_double_loop_identities(test_corpus):
    c = test_corpus["double_loop"]
    assert total_curvature(c) == pytest.approx(2 * TWO_PI, abs=1e-8)
    assert abs(minkowski_residual(c)) <= 1e-6 * c.length


def test_h0_support_curve_identities():
    c = legendrian_lift(support_to_curve(h0_cos2(), 128), 1.5)
    assert abs(minkowski_residual(c)) <= 1e-6 * c.length
