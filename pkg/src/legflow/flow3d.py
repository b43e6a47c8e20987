"""Legendrian curve expanding flow in M(0) and its length-preserving rescaling.

The expanding flow moves a Legendrian curve with velocity

    -(1/k) J(gamma_s) - 2 (int_0^s 1/k ds) T.

Its projection is planar inverse mean curvature flow, and the height is
recovered by horizontal lift.  The lift needs one extra scalar, the height
of the basepoint ``u = 0``; it starts at the initial ``z(0)`` and moves with
rate ``(x_t y - y_t x)(0, t)``, which makes the T-component of the velocity
vanish at ``s = 0`` as the formula above requires.  The basepoint is carried
as a fourth RK4 unknown so it shares the planar solver's clock.

The T-component integral is multivalued on a closed curve, so the
projection-plus-lift route is the canonical one.  :func:`step_rescaled_direct`
steps the rescaled flow pointwise on the fundamental domain ``u in [0, 1)``
and exists for cross-checking.
"""

from dataclasses import dataclass

import numpy as np

from . import imcf_planar as _planar
from .diagnostics import minkowski_residual, total_curvature
from .errors import LegendrianError, SingularityError
from .heis_core import (
    DiscreteClosedCurve,
    curvature_of,
    dilate,
    horizontality_residual,
    legendrian_lift,
)
from .imcf_planar import SolverConfig
from .planar import PlanarCurve, planar_frame, signed_area
from .spectral import cumulative_integral
from .trajectory import FlowTrajectory


@dataclass
class BasepointState:
    """Height ``f(0, t)`` of the lift at ``u = 0``."""

    z_base: float

    def rate(self, zc, velocity):
        """``d z_base / dt = (x_t y - y_t x)`` at ``u = 0``."""
        return velocity[0].real * zc[0].imag - velocity[0].imag * zc[0].real


def state_diagnostics(curve):
    k = curvature_of(curve)
    return {
        "length": curve.length,
        "kmin": float(np.min(k)),
        "kmax": float(np.max(k)),
        "leg_residual": horizontality_residual(curve, check=False).max_abs,
        "minkowski": minkowski_residual(curve),
        "total_curvature": total_curvature(curve),
        "holonomy": curve.vertical_holonomy,
    }


def require_legendrian(curve, legendrian_tol=1e-8):
    rep = horizontality_residual(curve, legendrian_tol)
    if not rep.is_legendrian:
        raise LegendrianError(
            f"initial curve is not Legendrian: max residual {rep.max_abs:.3g} "
            f"> {rep.tolerance:.3g}"
        )
    return rep


def evolve_expanding(curve, config=None, legendrian_tol=1e-8):
    """Run the expanding flow from a Legendrian curve.

    Parameters
    ----------
    curve : DiscreteClosedCurve
        Legendrian initial data whose projection has nonvanishing curvature.
    config : SolverConfig
        Time step, output times, curvature floor.

    Returns
    -------
    FlowTrajectory
        States are lifts of the evolved projection; diagnostics hold length,
        curvature range, horizontality residual, Minkowski integral, total
        curvature and holonomy.

    Raises
    ------
    LegendrianError
        Initial data not horizontal within tolerance.
    SingularityError
        Curvature of the projection fell below ``config.k_floor``.
    """
    config = config or SolverConfig()
    require_legendrian(curve, legendrian_tol)
    if config.scheme != "explicit-RK4" or config.mode != "pure":
        raise ValueError("the basepoint rule needs material samples: use explicit-RK4 in pure mode")
    out_times = config.times()
    zc = curve.x + 1j * curve.y
    base = BasepointState(float(curve.z[0]))

    def rhs(zc, t, frame=None):
        v = _planar._velocity_complex(zc, config.k_floor, t, frame)
        return v, base.rate(zc, v)

    states = [curve]
    diags = [state_diagnostics(curve)]
    t = 0.0
    zb = base.z_base
    for t_out in out_times[1:]:
        while t < t_out - 1e-14 * max(1.0, t_out):
            frame = _planar._frame_complex(zc)
            h = min(config.dt, t_out - t, _planar._cfl(frame, config.cfl_safety))
            v1, b1 = rhs(zc, t, frame)
            v2, b2 = rhs(zc + 0.5 * h * v1, t)
            v3, b3 = rhs(zc + 0.5 * h * v2, t)
            v4, b4 = rhs(zc + h * v3, t)
            zc = zc + h / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4)
            zb = zb + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4)
            t = t + h
        t = float(t_out)
        base.z_base = zb
        state = legendrian_lift(PlanarCurve(np.column_stack([zc.real, zc.imag])), zb)
        states.append(state)
        diags.append(state_diagnostics(state))
    return FlowTrajectory(out_times, states, diags, kind="expanding")


def rescale_trajectory(traj):
    """Apply ``delta_{exp(-t)}`` to every state of an expanding trajectory."""
    if traj.kind != "expanding":
        raise ValueError(f"expected an expanding trajectory, got {traj.kind!r}")
    states = [dilate(s, np.exp(-t)) for t, s in zip(traj.times, traj.states)]
    diags = [state_diagnostics(s) for s in states]
    return FlowTrajectory(traj.times.copy(), states, diags, kind="rescaled")


# --------------------------------------------------------------------------
# direct stepping of the rescaled flow


def rescaled_velocity(points, k_floor=1e-4):
    """Coordinate velocity of the rescaled flow without its tangential part.

    J-component ``-(1/k + g(gamma, J gamma_s))`` and T-component
    ``-2 (int_0^s 1/k ds + z)``, with the arc-length integral started at
    ``u = 0``.
    """
    pts = np.asarray(points)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    speed, k, d1 = _planar._frame_complex(x + 1j * y)
    bad = np.flatnonzero(~(np.abs(k) >= k_floor))
    if bad.size:
        j = int(bad[0])
        raise SingularityError(f"curvature {k[j]:.3g} below floor at sample {j}", index=j)
    tx, ty = d1.real / speed, d1.imag / speed
    pair = y * tx - x * ty  # g(gamma, J gamma_s)
    cJ = -(1.0 / k + pair)
    cT = -2.0 * (cumulative_integral(speed / k) + z)
    # J gamma_s = -ty X1 + tx X2
    a1, a2 = -cJ * ty, cJ * tx
    return np.column_stack([a1, a2, cT - x * a2 + y * a1])


def step_rescaled_direct(curve, dt, k_floor=1e-4):
    """One explicit RK4 step of the rescaled flow, applied pointwise.

    The tangential term only reparameterizes, so it is omitted; compare
    results with parameterization-free measures.
    """
    if dt == 0:
        return curve
    p = np.array(curve.points)
    k1 = rescaled_velocity(p, k_floor)
    k2 = rescaled_velocity(p + 0.5 * dt * k1, k_floor)
    k3 = rescaled_velocity(p + 0.5 * dt * k2, k_floor)
    k4 = rescaled_velocity(p + dt * k3, k_floor)
    p = p + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    holonomy = -2.0 * signed_area(PlanarCurve(p[:, :2]))
    return DiscreteClosedCurve(p, holonomy, method=curve.method)


# --------------------------------------------------------------------------
# velocity decomposition


def expanding_velocity(curve, k_floor=1e-4):
    """Coordinate velocity of the expanding flow at each sample."""
    x, y = curve.x, curve.y
    speed, k, d1 = _planar._frame_complex(x + 1j * y)
    bad = np.flatnonzero(~(np.abs(k) >= k_floor))
    if bad.size:
        j = int(bad[0])
        raise SingularityError(f"curvature {k[j]:.3g} below floor at sample {j}", index=j)
    tx, ty = d1.real / speed, d1.imag / speed
    a1, a2 = ty / k, -tx / k  # -(1/k) J gamma_s
    aT = -2.0 * cumulative_integral(speed / k)
    return np.column_stack([a1, a2, aT - x * a2 + y * a1])


def normal_speed_decompose(curve, velocity):
    """Project coordinate velocities onto ``{gamma_s, J gamma_s, T}``.

    Returns
    -------
    tangential, j_normal, vertical : ndarray
        ``g_theta`` components at each sample.
    """
    v = np.asarray(velocity, dtype=float)
    frame = planar_frame(curve.projection())
    t = frame["tangent"]
    a1, a2 = v[:, 0], v[:, 1]
    aT = v[:, 2] + curve.x * a2 - curve.y * a1
    tangential = a1 * t[:, 0] + a2 * t[:, 1]
    j_normal = -a1 * t[:, 1] + a2 * t[:, 0]
    return tangential, j_normal, aT
