"""Inverse mean curvature flow of closed planar curves.

The projection of a Legendrian curve under the expanding flow moves with
velocity ``-(1/k) n`` where ``n`` is the left normal and ``k`` the signed
curvature; for either orientation this is outward motion with speed
``1/|k|``.  Two backends are provided:

* a parametric explicit RK4 solver with spectral derivatives (general),
* an exact solution for convex curves in support-function form, where the
  flow becomes the linear equation ``h_t = h + h''`` and Fourier mode ``m``
  is simply multiplied by ``exp((1 - m^2) t)``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConvexityError, SingularityError
from .planar import PlanarCurve, planar_frame
from .spectral import cumulative_integral, derivative, fourier_eval, uniform_grid
from .trajectory import FlowTrajectory

__all__ = [
    "PlanarCurve",
    "SupportFunction",
    "SolverConfig",
    "cfl_limit",
    "imcf_velocity",
    "step_parametric",
    "evolve_parametric",
    "evolve_planar",
    "support_transform",
    "support_to_curve",
    "evolve_support_exact",
    "hausdorff_distance",
]


@dataclass(frozen=True)
class SolverConfig:
    """Time-stepping parameters.

    ``dt`` is an upper bound; each step is further limited by the CFL
    condition ``cfl_safety * min_j (|k_j| ds_j)^2`` of the ``1/k^2``
    diffusion and clipped to land on output times.
    """

    dt: float = 1e-4
    t_end: float = 1.0
    k_floor: float = 1e-4
    cfl_safety: float = 0.25
    scheme: str = "explicit-RK4"
    mode: str = "pure"
    output_times: tuple = field(default=None)
    n_outputs: int = 11

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_end < 0:
            raise ValueError(f"t_end must be non-negative, got {self.t_end}")
        if not 0 < self.cfl_safety <= 1:
            raise ValueError(f"cfl_safety must lie in (0, 1], got {self.cfl_safety}")
        if self.scheme not in ("explicit-RK4", "exact-spectral"):
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if self.mode not in ("pure", "shape"):
            raise ValueError(f"unknown mode {self.mode!r}")

    def times(self):
        if self.output_times is not None:
            out = np.asarray(self.output_times, dtype=float)
        elif self.t_end == 0:
            out = np.array([0.0])
        else:
            out = np.linspace(0.0, self.t_end, max(self.n_outputs, 2))
        if out[0] != 0.0:
            out = np.concatenate([[0.0], out])
        return out


# --------------------------------------------------------------------------
# parametric backend


def _spectral_ops(n):
    k = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n)
    ik = 1j * k
    ik[n // 2] = 0.0
    return ik, -(k**2)


def _frame_complex(zc):
    """Speed, signed curvature and ``gamma_u`` for ``zc = x + i y``."""
    ik, k2 = _spectral_ops(zc.size)
    Z = np.fft.fft(zc)
    d1 = np.fft.ifft(ik * Z)
    d2 = np.fft.ifft(k2 * Z)
    speed = np.abs(d1)
    k = (d1.conj() * d2).imag / speed**3
    return speed, k, d1


def _frame_arrays(points):
    speed, k, d1 = _frame_complex(points[:, 0] + 1j * points[:, 1])
    normal = np.column_stack([-d1.imag, d1.real]) / speed[:, None]
    return speed, k, normal


def _velocity_complex(zc, k_floor, t, frame=None):
    speed, k, d1 = frame if frame is not None else _frame_complex(zc)
    bad = np.flatnonzero(~(np.abs(k) >= k_floor))
    if bad.size:
        j = int(bad[np.argmin(np.abs(k[bad]))])
        when = "" if t is None else f" at t={t:.6g}"
        raise SingularityError(
            f"curvature {k[j]:.3g} below floor {k_floor:g} at sample {j}{when}",
            time=t,
            index=j,
        )
    # left normal is i * tangent
    return -1j * d1 / (speed * k)


def imcf_velocity(points, k_floor=1e-4, t=None):
    """Velocity ``-(1/k) n`` at every sample.

    Raises
    ------
    SingularityError
        If ``|k| < k_floor`` anywhere (the speed ``1/k`` blows up).
    """
    v = _velocity_complex(points[:, 0] + 1j * points[:, 1], k_floor, t)
    return np.column_stack([v.real, v.imag])


def _cfl(frame, cfl_safety):
    speed, k, _ = frame
    return cfl_safety * float(np.min((np.abs(k) * speed / speed.size) ** 2))


def cfl_limit(points, cfl_safety=0.25):
    return _cfl(_frame_complex(points[:, 0] + 1j * points[:, 1]), cfl_safety)


def _rk4_complex(zc, dt, k_floor, t, frame=None):
    k1 = _velocity_complex(zc, k_floor, t, frame)
    k2 = _velocity_complex(zc + 0.5 * dt * k1, k_floor, t)
    k3 = _velocity_complex(zc + 0.5 * dt * k2, k_floor, t)
    k4 = _velocity_complex(zc + dt * k3, k_floor, t)
    return zc + dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _rk4(points, dt, k_floor, t):
    zc = _rk4_complex(points[:, 0] + 1j * points[:, 1], dt, k_floor, t)
    return np.column_stack([zc.real, zc.imag])


def redistribute_arclength(points):
    """Resample a closed curve at uniform arc length (same shape)."""
    n = points.shape[0]
    speed = np.hypot(*derivative(points, 1).T)
    s = cumulative_integral(speed)
    L = float(np.mean(speed))
    target = L * np.arange(n) / n
    u = uniform_grid(n)
    u_new = np.interp(target, np.append(s, L), np.append(u, 1.0))
    return fourier_eval(points, u_new)


def step_parametric(curve, dt, k_floor=1e-4, mode="pure", t=0.0):
    """One explicit RK4 step of the planar flow.

    In ``"shape"`` mode samples are redistributed to uniform arc length
    afterwards; that changes only the parameterization.
    """
    if dt == 0:
        return curve
    pts = _rk4(curve.points, dt, k_floor, t)
    if mode == "shape":
        pts = redistribute_arclength(pts)
    return PlanarCurve(pts, method=curve.method)


def planar_diagnostics(points):
    speed, k, _ = _frame_arrays(points)
    return {
        "length": float(np.mean(speed)),
        "kmin": float(np.min(k)),
        "kmax": float(np.max(k)),
    }


def evolve_parametric(curve, config):
    """Integrate the planar flow up to ``config.t_end``.

    Raises
    ------
    SingularityError
        Curvature fell below ``config.k_floor``; ``time`` holds the time
        reached.
    """
    out_times = config.times()
    zc = curve.points[:, 0] + 1j * curve.points[:, 1]
    t = 0.0
    states = [curve]
    diags = [planar_diagnostics(curve.points)]
    for t_out in out_times[1:]:
        while t < t_out - 1e-14 * max(1.0, t_out):
            frame = _frame_complex(zc)
            h = min(config.dt, t_out - t, _cfl(frame, config.cfl_safety))
            zc = _rk4_complex(zc, h, config.k_floor, t, frame)
            if config.mode == "shape":
                pts = redistribute_arclength(np.column_stack([zc.real, zc.imag]))
                zc = pts[:, 0] + 1j * pts[:, 1]
            t = t + h
        t = float(t_out)
        pts = np.column_stack([zc.real, zc.imag])
        states.append(PlanarCurve(pts, method=curve.method))
        diags.append(planar_diagnostics(pts))
    return FlowTrajectory(out_times, states, diags, kind="planar")


# --------------------------------------------------------------------------
# support functions


@dataclass(frozen=True)
class SupportFunction:
    """``h(theta) = sum_m a_m cos(m theta) + b_m sin(m theta)``, ``m <= n_max``.

    ``fourier_sin[0]`` is ignored.
    """

    fourier_cos: np.ndarray
    fourier_sin: np.ndarray

    def __post_init__(self):
        a = np.array(self.fourier_cos, dtype=float)
        b = np.array(self.fourier_sin, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise ValueError("fourier_cos and fourier_sin must be 1-D of equal length")
        b[0] = 0.0
        object.__setattr__(self, "fourier_cos", a)
        object.__setattr__(self, "fourier_sin", b)

    @classmethod
    def from_modes(cls, modes, n_max=None):
        """Build from ``{m: (a_m, b_m)}``."""
        top = max(modes) if n_max is None else n_max
        a = np.zeros(top + 1)
        b = np.zeros(top + 1)
        for m, (am, bm) in modes.items():
            a[m], b[m] = am, bm
        return cls(a, b)

    @property
    def n_max(self):
        return self.fourier_cos.size - 1

    @property
    def modes(self):
        return np.arange(self.n_max + 1)

    def __call__(self, theta, deriv=0):
        theta = np.asarray(theta, dtype=float)
        m = self.modes
        ang = np.multiply.outer(theta, m)
        c, s = np.cos(ang), np.sin(ang)
        # d^j/dtheta^j of cos/sin cycles with period 4
        a = self.fourier_cos * m**deriv
        b = self.fourier_sin * m**deriv
        r = deriv % 4
        if r == 0:
            val = c @ a + s @ b
        elif r == 1:
            val = -s @ a + c @ b
        elif r == 2:
            val = -(c @ a + s @ b)
        else:
            val = s @ a - c @ b
        return val

    def radius_of_curvature(self, theta):
        """``rho = h + h''``."""
        return self(theta) + self(theta, 2)

    def check_convex(self, n_theta=None):
        n_theta = n_theta or max(512, 16 * self.n_max)
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        rho = self.radius_of_curvature(theta)
        j = int(np.argmin(rho))
        if not rho[j] > 0:
            raise ConvexityError(
                f"support function not strictly convex: rho={rho[j]:.3g} at theta={theta[j]:.4f}",
                theta=float(theta[j]),
            )
        return float(rho[j])

    def scaled(self, factors):
        return SupportFunction(self.fourier_cos * factors, self.fourier_sin * factors)

    def __sub__(self, other):
        n = max(self.n_max, other.n_max) + 1
        pad = lambda v: np.pad(v, (0, n - v.size))
        return SupportFunction(
            pad(self.fourier_cos) - pad(other.fourier_cos),
            pad(self.fourier_sin) - pad(other.fourier_sin),
        )


def support_to_curve(h, n_samples=256):
    """Convex curve with support function ``h``, counterclockwise.

    ``gamma(theta) = h (cos, sin) + h' (-sin, cos)`` on a uniform theta grid,
    i.e. the samples sit at uniformly spaced outward normal angles.
    """
    h.check_convex()
    theta = 2 * np.pi * np.arange(n_samples) / n_samples
    hv, hp = h(theta), h(theta, 1)
    c, s = np.cos(theta), np.sin(theta)
    return PlanarCurve(np.column_stack([hv * c - hp * s, hv * s + hp * c]))


def support_transform(curve, n_max=None):
    """Support function of a strictly convex closed curve.

    At every sample the outward normal angle ``theta_j`` and the values
    ``h = <p, nu>``, ``h' = <p, nu_perp>`` are exact; a least-squares
    Fourier fit through these nonuniform nodes gives the coefficients.

    Raises
    ------
    ConvexityError
        Curvature changes sign, or the curve is not simple convex.
    """
    frame = planar_frame(curve)
    k = frame["k"]
    sign = np.sign(np.median(k))
    bad = np.flatnonzero(~(k * sign > 0))
    pts = curve.points
    tangent, normal = frame["tangent"], frame["normal"]
    outward = -sign * normal
    theta_nodes = np.arctan2(outward[:, 1], outward[:, 0])
    if bad.size:
        j = int(bad[0])
        raise ConvexityError(
            f"curve not strictly convex: k={k[j]:.3g} at sample {j} "
            f"(theta={theta_nodes[j]:.4f})",
            theta=float(theta_nodes[j]),
        )
    turning = np.sum(k * frame["speed"]) / k.size / (2 * np.pi)
    if abs(abs(turning) - 1.0) > 1e-3:
        raise ConvexityError(f"curve is not simple convex (turning number {turning:.3f})")
    n_max = n_max or min(curve.n_samples // 4, 64)
    h_vals = np.sum(pts * outward, axis=1)
    # d nu / d theta is nu rotated by +90 degrees
    nu_perp = np.column_stack([-outward[:, 1], outward[:, 0]])
    hp_vals = np.sum(pts * nu_perp, axis=1)
    m = np.arange(n_max + 1)
    ang = np.multiply.outer(theta_nodes, m)
    c, s = np.cos(ang), np.sin(ang)
    A = np.block([[c, s[:, 1:]], [-s * m, (c * m)[:, 1:]]])
    rhs = np.concatenate([h_vals, hp_vals])
    coef, *_ = np.linalg.lstsq(A, rhs, rcond=None)
    a = coef[: n_max + 1]
    b = np.concatenate([[0.0], coef[n_max + 1:]])
    h = SupportFunction(a, b)
    h.check_convex()
    return h


def evolve_support_exact(h0, t):
    """Exact flow of a convex support function: mode ``m`` times ``e^{(1-m^2)t}``.

    Raises
    ------
    ConvexityError
        If strict convexity fails anywhere on ``[0, t]``; ``critical_time``
        estimates where.
    """
    m = h0.modes
    factors = lambda tau: np.exp((1.0 - m.astype(float) ** 2) * tau)
    # forward flow preserves rho > 0; only backward times can lose convexity
    checks = np.linspace(0.0, t, 17) if t != 0 else np.array([0.0])
    n_theta = max(512, 16 * h0.n_max)
    theta = 2 * np.pi * np.arange(n_theta) / n_theta

    def min_rho(tau):
        return float(np.min(h0.scaled(factors(tau)).radius_of_curvature(theta)))

    prev = None
    for tau in checks:
        if not min_rho(tau) > 0:
            lo, hi = (prev, tau) if prev is not None else (tau, tau)
            for _ in range(50 if prev is not None else 0):
                mid = 0.5 * (lo + hi)
                lo, hi = (mid, hi) if min_rho(mid) > 0 else (lo, mid)
            raise ConvexityError(
                f"convexity lost near t={hi:.6g}", critical_time=float(hi)
            )
        prev = tau
    return h0.scaled(factors(t))


def evolve_planar(curve, config):
    """Dispatch on ``config.scheme``."""
    if config.scheme == "explicit-RK4":
        return evolve_parametric(curve, config)
    h0 = support_transform(curve)
    times = config.times()
    states, diags = [], []
    for tau in times:
        c = support_to_curve(evolve_support_exact(h0, tau), curve.n_samples)
        states.append(c)
        diags.append(planar_diagnostics(c.points))
    return FlowTrajectory(times, states, diags, kind="planar")


# --------------------------------------------------------------------------
# shape comparison


def _closest_param(points, d1, d2, p, u0, iters=8):
    u = u0
    for _ in range(iters):
        g = fourier_eval(points, [u])[0] - p
        gp = fourier_eval(d1, [u])[0]
        gpp = fourier_eval(d2, [u])[0]
        f1 = g @ gp
        f2 = gp @ gp + g @ gpp
        if f2 <= 0:
            break
        step = f1 / f2
        u -= step
        if abs(step) < 1e-15:
            break
    return float(np.linalg.norm(fourier_eval(points, [u])[0] - p))


def _directed(a, b, refine):
    n = b.shape[0]
    d1 = derivative(b, 1)
    d2 = derivative(b, 2)
    dense_u = np.arange(refine * n) / (refine * n)
    dense = fourier_eval(b, dense_u)
    worst = 0.0
    for p in a:
        j = int(np.argmin(np.sum((dense - p) ** 2, axis=1)))
        worst = max(worst, _closest_param(b, d1, d2, p, dense_u[j]))
    return worst


def hausdorff_distance(curve_a, curve_b, refine=4):
    """Hausdorff distance between the trigonometric interpolants.

    Sample points of each curve are projected onto the other curve with
    Newton iterations, so the result is not limited by the sample spacing.
    """
    a = np.asarray(getattr(curve_a, "points", curve_a))[:, :2]
    b = np.asarray(getattr(curve_b, "points", curve_b))[:, :2]
    return max(_directed(a, b, refine), _directed(b, a, refine))

