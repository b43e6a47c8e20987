import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from legflow.errors import DegenerateCurveError, HolonomyMismatchError
from legflow.geodesics import make_helix
from legflow.heis_core import (
    DiscreteClosedCurve,
    HeisFrameVector,
    curvature_of,
    dilate,
    dilate_point,
    frame_decompose,
    frame_to_coordinates,
    g_theta,
    horizontality_residual,
    left_translate,
    legendrian_lift,
    metric_and_length,
)
from legflow.imcf_planar import support_to_curve
from legflow.planar import PlanarCurve, planar_frame
from legflow.shapes import circle, h0_cos2

TWO_PI = 2 * np.pi


def shoelace(points):
    """Polygon area from the samples, independent of the spectral machinery."""
    x, y = points[:, 0], points[:, 1]
    return 0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y)


# frame ---------------------------------------------------------------------


@pytest.mark.parametrize(
    "point, velocity, expected",
    [
        ((0, 0, 0), (1, 0, 0), (1, 0, 0)),
        ((1, 2, 0), (0, 0, 1), (0, 0, 1)),
        ((1, 0, 0), (0, 1, 0), (0, 1, 1)),
    ],
)
def test_frame_decompose_examples(point, velocity, expected):
    v = frame_decompose(point, velocity)
    assert (v.a1, v.a2, v.aT) == pytest.approx(expected, abs=1e-15)


def test_frame_decompose_on_circle_direct_formula():
    u = 0.7
    v = frame_decompose((np.cos(u), np.sin(u), 0.0), (-np.sin(u), np.cos(u), 0.0))
    assert v.aT == pytest.approx(np.cos(u) ** 2 + np.sin(u) ** 2)


def test_frame_round_trip():
    p = (0.3, -1.2, 4.0)
    vel = np.array([0.5, 2.0, -1.0])
    back = frame_to_coordinates(p, frame_decompose(p, vel))
    assert np.allclose(back, vel)


finite = st.floats(-10, 10, allow_nan=False)


@settings(max_examples=60)
@given(a1=finite, a2=finite, b1=finite, b2=finite, bT=finite)
def test_J_algebra(a1, a2, b1, b2, bT):
    U = HeisFrameVector(a1, a2, 0.0)
    V = HeisFrameVector(b1, b2, bT)
    JJ = U.J().J()
    assert (JJ.a1, JJ.a2, JJ.aT) == pytest.approx((-a1, -a2, 0.0))
    assert g_theta(U.J(), V) + g_theta(U, V.J()) == pytest.approx(0.0, abs=1e-9)
    assert V.norm2() == pytest.approx(b1 * b1 + b2 * b2 + bT * bT)


# curves --------------------------------------------------------------------


def test_curve_validation():
    with pytest.raises(ValueError):
        DiscreteClosedCurve(np.zeros((15, 3)))
    with pytest.raises(ValueError):
        DiscreteClosedCurve(np.zeros((16, 2)))
    pts = np.column_stack([np.zeros(16), np.zeros(16), np.arange(16.0)])
    with pytest.raises(DegenerateCurveError):
        DiscreteClosedCurve(pts)


def test_lift_is_horizontal_at_machine_precision(unit_circle_lift):
    rep = horizontality_residual(unit_circle_lift)
    assert rep.max_abs <= 1e-10 and rep.is_legendrian


def test_planar_circle_at_zero_height_is_not_horizontal():
    u = TWO_PI * np.arange(64) / 64
    curve = DiscreteClosedCurve(np.column_stack([np.cos(u), np.sin(u), np.zeros(64)]))
    rep = horizontality_residual(curve)
    # x y_u - y x_u = 2 pi with u in [0, 1)
    assert np.allclose(rep.residuals, TWO_PI, atol=1e-12)
    assert not rep.is_legendrian


def test_helix_is_horizontal():
    assert horizontality_residual(make_helix(1.5, n_turns=2)).max_abs <= 1e-10


def test_nonperiodic_z_with_zero_holonomy_is_rejected():
    lift = legendrian_lift(circle(64))
    bad = DiscreteClosedCurve(lift.points, 0.0)
    with pytest.raises(HolonomyMismatchError, match="non-periodic"):
        horizontality_residual(bad)


@pytest.mark.parametrize("r, orient", [(1.0, 1), (2.5, 1), (1.0, -1)])
def test_circle_curvature(r, orient):
    pts = circle(128, r).points.copy()
    if orient < 0:
        pts = pts[::-1]
    k = curvature_of(PlanarCurve(pts))
    assert np.allclose(k, orient / r, atol=1e-10)


def test_curvature_of_support_curve_matches_rho():
    h = h0_cos2()
    curve = support_to_curve(h, 256)
    theta = TWO_PI * np.arange(256) / 256
    # samples sit at outward normal angle theta
    assert np.allclose(1.0 / curvature_of(curve), 1 - 0.3 * np.cos(2 * theta), atol=1e-10)


def test_curvature_reports_degenerate_sample():
    u = TWO_PI * np.arange(32) / 32
    pts = np.column_stack([np.cos(u) ** 3, np.sin(u) ** 3])  # astroid cusps
    with pytest.raises(DegenerateCurveError) as info:
        planar_frame(PlanarCurve(pts))
    assert info.value.index in (0, 8, 16, 24)


def test_length_of_unit_circle(unit_circle_lift):
    w, L = metric_and_length(unit_circle_lift)
    assert L == pytest.approx(TWO_PI, abs=1e-10)
    assert np.all(w > 0)


def test_helix_length_equals_projected_length():
    r = 0.4
    helix = make_helix(1 / r)
    assert helix.length == pytest.approx(TWO_PI * r, abs=1e-10)


def test_unit_circle_lift_profile(unit_circle_lift):
    u = unit_circle_lift.u_grid
    assert np.allclose(unit_circle_lift.z, -TWO_PI * u, atol=1e-12)
    assert unit_circle_lift.vertical_holonomy == pytest.approx(-TWO_PI)


def test_lift_holonomy_of_translated_circle():
    lift = legendrian_lift(circle(256, center=(30.0, -12.0)))
    assert lift.vertical_holonomy == pytest.approx(-TWO_PI, rel=1e-10)
    assert horizontality_residual(lift).max_abs <= 1e-10 * max(1, lift.length)


def test_figure_eight_has_zero_holonomy():
    u = TWO_PI * np.arange(256) / 256
    pts = np.column_stack([np.sin(u), np.sin(u) * np.cos(u)])
    fig8 = PlanarCurve(pts)
    assert abs(shoelace(pts)) < 1e-14
    lift = legendrian_lift(fig8)
    assert abs(lift.vertical_holonomy) < 1e-12
    assert horizontality_residual(lift).max_abs <= 1e-10


def test_dilate_point():
    assert dilate_point((1, 2, 3), 2) == (2, 4, 12)


def test_dilate_identity_and_domain(unit_circle_lift):
    same = dilate(unit_circle_lift, 1.0)
    assert np.array_equal(same.points, unit_circle_lift.points)
    for lam in (0.0, -1.0):
        with pytest.raises(ValueError):
            dilate(unit_circle_lift, lam)


def test_dilate_by_three(unit_circle_lift):
    d = dilate(unit_circle_lift, 3.0)
    assert np.allclose(curvature_of(d), 1 / 3, atol=1e-12)
    assert d.length == pytest.approx(6 * np.pi, abs=1e-10)
    assert d.vertical_holonomy == pytest.approx(-18 * np.pi)
    assert -2 * shoelace(d.points) == pytest.approx(-18 * np.pi, rel=1e-3)
    assert horizontality_residual(d).is_legendrian


def test_left_translation_preserves_horizontality(unit_circle_lift):
    moved = left_translate(unit_circle_lift, (1.0, -2.0, 0.5))
    assert horizontality_residual(moved).max_abs <= 1e-10
    assert np.allclose(curvature_of(moved), 1.0, atol=1e-10)


# properties ----------------------------------------------------------------

coef = st.floats(-0.08, 0.08, allow_nan=False)


def random_projection(a, b, center):
    u = TWO_PI * np.arange(256) / 256
    r = 1.0 + sum(a[m] * np.cos((m + 2) * u) + b[m] * np.sin((m + 2) * u) for m in range(3))
    return PlanarCurve(np.column_stack([center[0] + r * np.cos(u), center[1] + r * np.sin(u)]))


@settings(max_examples=25, deadline=None)
@given(
    a=st.lists(coef, min_size=3, max_size=3),
    b=st.lists(coef, min_size=3, max_size=3),
    center=st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
    z0=st.floats(-5, 5),
)
def test_lift_exact_and_holonomy_is_area(a, b, center, z0):
    proj = random_projection(a, b, center)
    lift = legendrian_lift(proj, z0)
    assert lift.z[0] == pytest.approx(z0)
    assert horizontality_residual(lift).max_abs <= 1e-10 * max(1.0, lift.length)
    area = shoelace(proj.points)
    assert lift.vertical_holonomy == pytest.approx(-2 * area, rel=1e-3)


@settings(max_examples=25, deadline=None)
@given(
    a=st.lists(coef, min_size=3, max_size=3),
    b=st.lists(coef, min_size=3, max_size=3),
    lam=st.floats(0.1, 10.0),
)
def test_dilation_laws(a, b, lam):
    lift = legendrian_lift(random_projection(a, b, (0.2, -0.1)))
    d = dilate(lift, lam)
    assert d.length == pytest.approx(lam * lift.length, rel=1e-10)
    k = curvature_of(lift)
    assert np.max(np.abs(lam * curvature_of(d) - k)) <= 1e-10 * np.max(np.abs(k))
    assert horizontality_residual(d).is_legendrian
