"""Closed planar curves sampled on a uniform periodic parameter grid."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateCurveError
from .spectral import derivative, periodic_integral, uniform_grid

MIN_SAMPLES = 16


def _validate_n(n):
    if n < MIN_SAMPLES or n % 2:
        raise ValueError(f"n_samples must be even and >= {MIN_SAMPLES}, got {n}")


@dataclass(frozen=True, eq=False)
class PlanarCurve:
    """Closed planar curve ``u -> (x(u), y(u))`` with ``u`` in ``[0, 1)``.

    The parameter is material: flows move samples but never relabel them
    unless explicitly asked to (see the ``shape`` stepping mode).
    """

    points: np.ndarray
    method: str = field(default="spectral", compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ValueError(f"points must have shape (n, 2), got {pts.shape}")
        _validate_n(pts.shape[0])
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

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
    def orientation(self):
        """+1 for counterclockwise turning, -1 for clockwise."""
        frame = planar_frame(self)
        tc = periodic_integral(frame["k"] * frame["speed"])
        if abs(tc) > 1e-8:
            return 1 if tc > 0 else -1
        return 1 if signed_area(self) >= 0 else -1


def planar_frame(curve, method=None):
    """Parametric derivatives, unit tangent, left normal and signed curvature.

    Returns a dict with keys ``d1``, ``d2`` (first/second u-derivatives),
    ``speed`` (``|gamma_u|``), ``tangent``, ``normal`` (tangent rotated by
    +90 degrees) and ``k`` (signed curvature, +1 on the ccw unit circle).
    """
    method = method or curve.method
    pts = curve.points
    d1 = derivative(pts, 1, method=method)
    d2 = derivative(pts, 2, method=method)
    speed2 = np.sum(d1 * d1, axis=1)
    scale = np.mean(speed2)
    bad = np.flatnonzero(~(speed2 > 1e-24 * max(scale, 1e-300)))
    if bad.size:
        raise DegenerateCurveError(
            f"degenerate projection: zero speed at sample {bad[0]}", index=int(bad[0])
        )
    speed = np.sqrt(speed2)
    tangent = d1 / speed[:, None]
    normal = np.column_stack([-tangent[:, 1], tangent[:, 0]])
    k = (d1[:, 0] * d2[:, 1] - d1[:, 1] * d2[:, 0]) / speed**3
    return {"d1": d1, "d2": d2, "speed": speed, "tangent": tangent, "normal": normal, "k": k}


def planar_curvature(curve, method=None):
    return planar_frame(curve, method)["k"]


def planar_length(curve):
    return float(periodic_integral(planar_frame(curve)["speed"]))


def signed_area(curve):
    """Signed enclosed area, positive for counterclockwise loops."""
    d1 = derivative(curve.points, 1, method=curve.method)
    x, y = curve.x, curve.y
    return float(0.5 * periodic_integral(x * d1[:, 1] - y * d1[:, 0]))


def turning_number(curve):
    frame = planar_frame(curve)
    total = periodic_integral(frame["k"] * frame["speed"])
    return int(round(total / (2.0 * np.pi)))
