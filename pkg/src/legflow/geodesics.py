"""Geodesics of M(0): vertical-axis helices, horizontal lines, and the
vertical component of geodesic variation fields.

A Legendrian curve is a geodesic iff ``nabla_s gamma_s = k J gamma_s`` with
constant ``k``.  Written as ``nabla_s gamma_s + 2 lam J gamma_s = 0`` the
multiplier is ``lam = -k / 2``; see :func:`lambda_from_curvature`.

The Tanaka connection of M(0) parallelizes the left-invariant frame, so the
covariant derivative along a curve is the ordinary derivative of the frame
components.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import least_squares

from .errors import DegenerateCurveError
from .heis_core import DiscreteClosedCurve
from .spectral import derivative, uniform_grid


@dataclass(frozen=True)
class HelixParams:
    """Vertical-axis helix ``center + r (cos, sin)`` with linear height.

    ``pitch_rate`` is ``dz/ds`` measured after left-translating the axis to
    the origin, and ``z0`` is the translated height at the first sample.
    """

    center: tuple
    radius: float
    curvature_sign: int
    pitch_rate: float
    z0: float = 0.0

    @property
    def curvature(self):
        return self.curvature_sign / self.radius

    def to_record(self):
        cx, cy = self.center
        return (
            f"helix center=({cx:.17g},{cy:.17g}) radius={self.radius:.17g} "
            f"sign={self.curvature_sign:+d} pitch_rate={self.pitch_rate:.17g} z0={self.z0:.17g}"
        )


def lambda_from_curvature(k):
    """Multiplier in ``nabla_s gamma_s + 2 lam J gamma_s = 0``; ``lam = -k/2``."""
    return -0.5 * k


def make_helix(k, z0=0.0, n_turns=1, n_samples=256):
    """Closed-projection geodesic of curvature ``k`` around the z-axis.

    The projection is the circle of radius ``1/|k|`` traversed ``n_turns``
    times, counterclockwise for ``k > 0``.  Horizontality gives
    ``z = z0 - s / k``, a rise of ``-2 pi sign(k) / k^2`` per turn.
    """
    if k == 0:
        raise ValueError("k = 0 is a horizontal line; use make_horizontal_line")
    if n_turns < 1 or int(n_turns) != n_turns:
        raise ValueError(f"n_turns must be a positive integer, got {n_turns!r}")
    r = 1.0 / abs(k)
    sign = 1.0 if k > 0 else -1.0
    u = uniform_grid(n_samples)
    phi = sign * 2.0 * np.pi * n_turns * u
    s = 2.0 * np.pi * r * n_turns * u
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z0 - s / k])
    holonomy = -2.0 * np.pi * n_turns * r / k
    return DiscreteClosedCurve(pts, holonomy)


def make_horizontal_line(angle=0.0, basepoint=(0.0, 0.0, 0.0), s=None):
    """Samples of the horizontal line through ``basepoint`` with heading ``angle``.

    With unit direction ``(c, d)`` and basepoint ``(x0, y0, z0)`` the height
    is ``z0 + (y0 c - x0 d) s``, the unique choice making ``gamma_s``
    horizontal.

    Returns
    -------
    s, points : ndarray
        Arc-length samples and the ``(m, 3)`` coordinates.
    """
    s = np.linspace(-1.0, 1.0, 33) if s is None else np.asarray(s, dtype=float)
    x0, y0, z0 = (float(c) for c in basepoint)
    c, d = np.cos(angle), np.sin(angle)
    rate = y0 * c - x0 * d
    pts = np.column_stack([x0 + c * s, y0 + d * s, z0 + rate * s])
    return s, pts


def open_curve_frame(s, points):
    """Frame components of ``gamma_s`` and ``gamma_ss`` for an open sampled curve.

    Second-order finite differences on the given (possibly nonuniform) grid;
    exact for straight lines.
    """
    p = np.asarray(points, dtype=float)
    d = np.gradient(p, s, axis=0, edge_order=2)
    x, y = p[:, 0], p[:, 1]
    a = np.column_stack([d[:, 0], d[:, 1], d[:, 2] + x * d[:, 1] - y * d[:, 0]])
    return a, np.gradient(a, s, axis=0, edge_order=2)


def geodesic_residual(curve, k=None):
    """Sup norm of ``nabla_s gamma_s - k J gamma_s`` along a closed curve.

    ``k`` defaults to the mean curvature, so a geodesic gives zero.  Frame
    components of ``gamma_s`` are differentiated spectrally in arc length.
    """
    d1 = derivative(curve.points[:, :2], 1, method=curve.method)
    speed = np.hypot(d1[:, 0], d1[:, 1])
    zu = curve.z_derivative()
    a1, a2 = d1[:, 0] / speed, d1[:, 1] / speed
    aT = (zu + curve.x * d1[:, 1] - curve.y * d1[:, 0]) / speed
    comps = np.column_stack([a1, a2, aT])
    acc = derivative(comps, 1, method=curve.method) / speed[:, None]
    if k is None:
        k = float(np.sum((-a2 * acc[:, 0] + a1 * acc[:, 1]) * speed) / np.sum(speed))
    res = acc - k * np.column_stack([-a2, a1, np.zeros_like(a1)])
    return float(np.max(np.linalg.norm(res, axis=1)))


# --------------------------------------------------------------------------
# variation fields


@dataclass(frozen=True)
class VariationProfile:
    """``g(V, T)`` along a geodesic with ``alpha = k^2 + 2W``."""

    alpha: float
    s: np.ndarray
    samples: np.ndarray


def variation_vertical(alpha, s):
    """Closed form of ``g(V, T)(s)`` with ``g = g' = 0`` and ``g'' = 1`` at 0.

    ``(1 - cosh(sqrt(-alpha) s)) / alpha`` for ``alpha < 0``, ``s^2 / 2`` at
    zero and ``(1 - cos(sqrt(alpha) s)) / alpha`` for ``alpha > 0``.  Near
    zero the series is used so the map is continuous in ``alpha``.

    >>> float(variation_vertical(1.0, np.pi))
    2.0
    """
    s = np.asarray(s, dtype=float)
    if alpha == 0:
        out = 0.5 * s * s
    elif abs(alpha) * float(np.max(s * s, initial=0.0)) < 1e-6:
        # 1 - cos(x) over x^2 with x^2 = alpha s^2, to O(x^6)
        x2 = alpha * s * s
        out = s * s * (0.5 - x2 / 24.0 + x2 * x2 / 720.0)
    elif alpha > 0:
        out = (1.0 - np.cos(np.sqrt(alpha) * s)) / alpha
    else:
        out = (1.0 - np.cosh(np.sqrt(-alpha) * s)) / alpha
    return out if out.ndim else float(out)


def variation_profile(alpha, s):
    s = np.asarray(s, dtype=float)
    return VariationProfile(alpha, s, np.asarray(variation_vertical(alpha, s)))


def variation_ode_check(alpha, s_max, h=1e-3):
    """Integrate ``g''' + alpha g' = 0`` by RK4 and compare with the closed form.

    Returns the sup deviation over the RK4 nodes in ``[0, s_max]``.
    """
    n = max(1, int(np.ceil(s_max / h)))
    h = s_max / n
    A = np.array([[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, -alpha, 0.0]])
    # the RHS is linear and autonomous, so one RK4 step is a fixed matrix
    Ah = A * h
    step = np.eye(3)
    term = np.eye(3)
    for j in range(1, 5):
        term = term @ Ah / j
        step = step + term
    y = np.array([0.0, 0.0, 1.0])
    vals = np.empty(n + 1)
    vals[0] = y[0]
    for i in range(n):
        y = step @ y
        vals[i + 1] = y[0]
    exact = variation_vertical(alpha, np.linspace(0.0, s_max, n + 1))
    return float(np.max(np.abs(vals - exact)))


# --------------------------------------------------------------------------
# helix fitting


def _circle_algebraic(x, y):
    A = np.column_stack([x, y, np.ones_like(x)])
    b = x * x + y * y
    sol, _, rank, sv = np.linalg.lstsq(A, b, rcond=None)
    if rank < 3 or sv[-1] < 1e-10 * sv[0]:
        raise DegenerateCurveError("cannot fit a circle: projection samples are collinear")
    cx, cy = 0.5 * sol[0], 0.5 * sol[1]
    r2 = sol[2] + cx * cx + cy * cy
    if not r2 > 0:
        raise DegenerateCurveError("cannot fit a circle: nonpositive radius")
    return cx, cy, np.sqrt(r2)


def fit_helix(curve):
    """Fit a vertical-axis helix to a sampled curve.

    Parameters
    ----------
    curve : DiscreteClosedCurve or (n, 3) array

    Returns
    -------
    params : HelixParams
    residual : float
        RMS distance from the samples to the fitted helix divided by the
        curve length.

    Raises
    ------
    DegenerateCurveError
        Collinear projection.
    """
    pts = curve.points if isinstance(curve, DiscreteClosedCurve) else np.asarray(curve, float)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    cx, cy, r = _circle_algebraic(x, y)

    def radial(p):
        return np.hypot(x - p[0], y - p[1]) - p[2]

    sol = least_squares(radial, [cx, cy, r], method="lm", xtol=1e-15, ftol=1e-15)
    cx, cy, r = sol.x
    r = abs(r)
    # move the axis to the origin; heights change by the group law
    xt, yt = x - cx, y - cy
    zt = z - cy * x + cx * y
    theta = np.unwrap(np.arctan2(yt, xt))
    sign = 1 if theta[-1] >= theta[0] else -1
    s = sign * r * (theta - theta[0])
    pitch, z0 = np.polyfit(s, zt, 1)
    dr = np.hypot(xt, yt) - r
    dz = zt - (z0 + pitch * s)
    if isinstance(curve, DiscreteClosedCurve):
        length = curve.length
    else:
        length = float(np.sum(np.linalg.norm(np.diff(pts[:, :2], axis=0), axis=1)))
    rms = float(np.sqrt(np.mean(dr * dr + dz * dz)))
    params = HelixParams((float(cx), float(cy)), float(r), sign, float(pitch), float(z0))
    return params, rms / length
