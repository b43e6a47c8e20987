"""Geometry of the first Heisenberg group.

Model coordinates ``(x, y, z)`` with contact form ``x dy - y dx + dz`` and
left-invariant frame

    X1 = d/dx + y d/dz,   X2 = d/dy - x d/dz,   T = d/dz,

declared orthonormal by the Webster metric ``g_theta``.  The complex
structure rotates the horizontal plane: ``J X1 = X2``, ``J X2 = -X1``,
``J T = 0``.

Curves are sampled on ``u in [0, 1)``.  A closed horizontal projection
generally lifts to a curve whose height does not close up; the net rise
over one traversal is stored as ``vertical_holonomy``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurveError, HolonomyMismatchError
from .planar import MIN_SAMPLES, PlanarCurve, planar_frame, signed_area
from .spectral import derivative, periodic_integral, cumulative_integral, uniform_grid

LEGENDRIAN_RTOL = 1e-8


@dataclass(frozen=True)
class HeisFrameVector:
    """Components of a tangent vector in the frame ``{X1, X2, T}``.

    Fields may be scalars or equally-shaped arrays.
    """

    a1: float
    a2: float
    aT: float

    def J(self):
        return HeisFrameVector(-self.a2, self.a1, 0.0 * self.aT)

    def norm2(self):
        return self.a1**2 + self.a2**2 + self.aT**2

    def is_horizontal(self, atol=1e-12):
        return bool(np.all(np.abs(self.aT) <= atol))

    def as_array(self):
        return np.array([self.a1, self.a2, self.aT])


def g_theta(v, w):
    """Webster metric; the frame is orthonormal."""
    return v.a1 * w.a1 + v.a2 * w.a2 + v.aT * w.aT


def frame_decompose(point, velocity):
    """Express a coordinate velocity at ``point`` in the frame.

    >>> frame_decompose((1.0, 0.0, 0.0), (0.0, 1.0, 0.0))
    HeisFrameVector(a1=0.0, a2=1.0, aT=1.0)
    """
    x, y, _ = (np.asarray(c, dtype=float) for c in point)
    dx, dy, dz = (np.asarray(c, dtype=float) for c in velocity)
    comps = (dx, dy, dz + x * dy - y * dx)
    return HeisFrameVector(*(float(c) if c.ndim == 0 else c for c in comps))


def frame_to_coordinates(point, vec):
    """Inverse of :func:`frame_decompose`."""
    x, y, _ = point
    dx, dy = vec.a1, vec.a2
    return np.stack(np.broadcast_arrays(dx, dy, vec.aT - x * dy + y * dx), axis=-1)


@dataclass(frozen=True, eq=False)
class DiscreteClosedCurve:
    """Samples of a curve in M(0) on the uniform grid ``u_j = j / n``.

    Parameters
    ----------
    points : (n, 3) array
        Model coordinates ``(x, y, z)``.
    vertical_holonomy : float
        ``z(u + 1) - z(u)``; zero for curves that close up in 3D.
    method : {"spectral", "fd4"}
        Derivative backend used by the geometric operators.
    """

    points: np.ndarray
    vertical_holonomy: float = 0.0
    method: str = "spectral"
    metric_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 3:
            raise ValueError(f"points must have shape (n, 3), got {pts.shape}")
        n = pts.shape[0]
        if n < MIN_SAMPLES or n % 2:
            raise ValueError(f"n_samples must be even and >= {MIN_SAMPLES}, got {n}")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "vertical_holonomy", float(self.vertical_holonomy))
        d1 = derivative(pts[:, :2], 1, method=self.method)
        w = np.hypot(d1[:, 0], d1[:, 1])
        bad = np.flatnonzero(~(w > 1e-12 * max(np.mean(w), 1e-300)))
        if bad.size:
            raise DegenerateCurveError(
                f"not an immersion: vanishing projected speed at sample {bad[0]}",
                index=int(bad[0]),
            )
        w.setflags(write=False)
        object.__setattr__(self, "metric_weights", w)

    @property
    def n_samples(self):
        return self.points.shape[0]

    @property
    def u_grid(self):
        return uniform_grid(self.n_samples)

    @property
    def x(self):
        return self.points[:, 0]

    @property
    def y(self):
        return self.points[:, 1]

    @property
    def z(self):
        return self.points[:, 2]

    @property
    def length(self):
        return float(periodic_integral(self.metric_weights))

    def projection(self):
        return PlanarCurve(self.points[:, :2], method=self.method)

    def z_derivative(self):
        """``dz/du`` with the holonomy ramp handled exactly."""
        H = self.vertical_holonomy
        periodic = self.z - H * self.u_grid
        return derivative(periodic, 1, method=self.method) + H


@dataclass(frozen=True)
class HorizontalityReport:
    residuals: np.ndarray
    max_abs: float
    tolerance: float

    @property
    def is_legendrian(self):
        return self.max_abs <= self.tolerance


def estimate_holonomy(z):
    """Estimate ``z(1) - z(0)`` from samples on ``[0, 1)``.

    Degree-7 polynomial extrapolation across the seam from both sides,
    averaged.  Exact for polynomial-plus-ramp data, spectrally small for
    smooth lifts.
    """
    z = np.asarray(z, dtype=float)
    m = 8
    idx = np.arange(m, dtype=float)
    tail = np.polyfit(idx, z[-m:], m - 1)
    head = np.polyfit(idx, z[:m], m - 1)
    forward = np.polyval(tail, m) - z[0]
    backward = z[-1] - np.polyval(head, -1.0)
    return 0.5 * (forward + backward)


def check_holonomy(curve, rtol=1e-4):
    """Raise :class:`HolonomyMismatchError` if the z samples contradict
    the declared vertical holonomy."""
    est = estimate_holonomy(curve.z)
    scale = max(np.ptp(curve.z), curve.length**2, 1e-300)
    if abs(est - curve.vertical_holonomy) > rtol * scale:
        kind = "non-periodic z" if curve.vertical_holonomy == 0.0 else "holonomy mismatch"
        raise HolonomyMismatchError(
            f"{kind}: declared holonomy {curve.vertical_holonomy!r}, "
            f"samples imply {est:.6g}"
        )
    return est


def horizontality_residual(curve, legendrian_tol=LEGENDRIAN_RTOL, check=True):
    """Per-sample contact component ``z_u + x y_u - y x_u`` of ``gamma'(u)``.

    The curve is Legendrian iff this vanishes; the report flags it when the
    sup norm is within ``legendrian_tol * L``.
    """
    if check:
        check_holonomy(curve)
    d1 = derivative(curve.points[:, :2], 1, method=curve.method)
    res = curve.z_derivative() + curve.x * d1[:, 1] - curve.y * d1[:, 0]
    return HorizontalityReport(
        residuals=res,
        max_abs=float(np.max(np.abs(res))),
        tolerance=legendrian_tol * curve.length,
    )


def curvature_of(curve):
    """Signed curvature of a Legendrian curve.

    It coincides with the signed curvature of the xy-projection, so the
    counterclockwise unit circle (and its lift) has ``k = +1``.
    """
    if isinstance(curve, DiscreteClosedCurve):
        curve = curve.projection()
    return planar_frame(curve)["k"]


def metric_and_length(curve):
    """Return ``(|gamma'(u)|, L)``.

    For horizontal curves ``|gamma'|`` equals the projected speed.
    """
    return curve.metric_weights, curve.length


def legendrian_lift(planar, z0=0.0):
    """Horizontal lift of a closed planar curve with ``z(0) = z0``.

    ``z_u = y x_u - x y_u`` integrated spectrally; the holonomy equals
    ``-2 * signed_area(planar)``.
    """
    d1 = derivative(planar.points, 1, method=planar.method)
    integrand = planar.y * d1[:, 0] - planar.x * d1[:, 1]
    z = z0 + cumulative_integral(integrand)
    holonomy = float(periodic_integral(integrand))
    pts = np.column_stack([planar.points, z])
    return DiscreteClosedCurve(pts, holonomy, method=planar.method)


def dilate(curve, lam):
    """Heisenberg dilation ``(x, y, z) -> (lam x, lam y, lam^2 z)``."""
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam!r}")
    scale = np.array([lam, lam, lam * lam])
    return DiscreteClosedCurve(
        curve.points * scale, curve.vertical_holonomy * lam * lam, method=curve.method
    )


def dilate_point(p, lam):
    if not lam > 0:
        raise ValueError(f"dilation factor must be positive, got {lam!r}")
    x, y, z = p
    return (lam * x, lam * y, lam * lam * z)


def left_translate(curve, p):
    """Left translation by ``p`` using the group law
    ``p * q = (p1 + q1, p2 + q2, p3 + q3 + p2 q1 - p1 q2)``.

    Preserves horizontality and the frame components of tangent vectors.
    """
    p1, p2, p3 = p
    x, y, z = curve.x, curve.y, curve.z
    pts = np.column_stack([x + p1, y + p2, z + p3 + p2 * x - p1 * y])
    # ramp of p2 x - p1 y over one period vanishes for closed projections
    return DiscreteClosedCurve(pts, curve.vertical_holonomy, method=curve.method)


def holonomy_from_area(planar):
    return -2.0 * signed_area(planar)
