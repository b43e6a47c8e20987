"""Intrinsic evolution of ``phi = k^2`` along the expanding flow.

On a fixed parameter circle the metric stretches as ``|gamma'(u, t)| =
m0(u) e^t``, so arc-length derivatives are ``(m0 e^t)^{-1} d/du`` and the
squared curvature obeys

    phi_t = phi^{-1} phi_ss - (3/2) phi^{-2} phi_s^2 - 2 phi - 4 W

for a constant Webster scalar curvature ``W``.  Spatially constant data
reduce to ``phi' = -2 phi - 4 W`` with solution
``(phi0 + 2W) e^{-2t} - 2W``; for ``W > 0`` it reaches zero in finite time.

The parameter circle is ``[0, 2 pi)`` by default so data like
``1 + 0.2 sin u`` are periodic.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import SingularityError
from .spectral import uniform_grid

TWO_PI = 2.0 * np.pi
BREAKDOWN = "curvature -> 0 (flow speed blow-up)"


@dataclass(frozen=True)
class WebsterParam:
    """Constant Webster scalar curvature (units 1/length^2)."""

    W: float

    def __post_init__(self):
        if not np.isfinite(self.W):
            raise ValueError(f"W must be finite, got {self.W!r}")


def _webster(W):
    return W.W if isinstance(W, WebsterParam) else float(W)


@dataclass(frozen=True, eq=False)
class CurvatureField:
    """Samples of ``k^2`` with the initial metric factor ``m0 = |gamma'(u, 0)|``."""

    phi: np.ndarray
    m0: np.ndarray = None
    t: float = 0.0
    period: float = TWO_PI

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        if phi.ndim != 1 or phi.size < 4 or phi.size % 2:
            raise ValueError(f"phi must be a 1-D array of even length >= 4, got shape {phi.shape}")
        m0 = np.ones_like(phi) if self.m0 is None else np.array(self.m0, dtype=float)
        if np.ndim(m0) == 0:
            m0 = np.full_like(phi, float(m0))
        if m0.shape != phi.shape:
            raise ValueError("m0 and phi differ in shape")
        if not np.all(m0 > 0):
            raise ValueError("metric factor m0 must be positive")
        phi.setflags(write=False)
        m0.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "m0", m0)
        object.__setattr__(self, "t", float(self.t))

    @property
    def n_samples(self):
        return self.phi.size

    @property
    def u_grid(self):
        return uniform_grid(self.n_samples, self.period)

    @property
    def metric(self):
        return self.m0 * np.exp(self.t)

    def with_phi(self, phi, t):
        return CurvatureField(phi, self.m0, t, self.period)


class _Ops:
    """Cached rfft multipliers for one grid size and period."""

    def __init__(self, n, period):
        k = TWO_PI * np.fft.rfftfreq(n, d=period / n)
        self.ik = 1j * k
        self.ik[-1] = 0.0  # drop Nyquist for the odd derivative
        self.k2 = -(k * k)
        self.kmax = float(np.max(np.abs(k)))

    def d1_d2(self, f):
        F = np.fft.rfft(f)
        n = f.size
        return np.fft.irfft(self.ik * F, n), np.fft.irfft(self.k2 * F, n)


_OPS_CACHE = {}


def _ops(n, period):
    key = (n, float(period))
    ops = _OPS_CACHE.get(key)
    if ops is None:
        ops = _OPS_CACHE[key] = _Ops(n, period)
    return ops


def arc_derivatives(f, m0, t, period=TWO_PI):
    """``(f_s, f_ss)`` with ``d/ds = (m0 e^t)^{-1} d/du``."""
    inv = 1.0 / (np.asarray(m0) * np.exp(t))
    fu, fuu = _ops(f.size, period).d1_d2(f)
    fs = inv * fu
    # f_ss = inv d/du (inv f_u); m0 may vary in u
    if np.ndim(m0) and np.ptp(m0) > 0:
        gu, _ = _ops(f.size, period).d1_d2(fs)
        return fs, inv * gu
    return fs, inv * inv * fuu


def k2_rhs(phi, m0, t, W, period=TWO_PI):
    """Right-hand side of the ``k^2`` equation."""
    ps, pss = arc_derivatives(phi, m0, t, period)
    return pss / phi - 1.5 * ps * ps / (phi * phi) - 2.0 * phi - 4.0 * W


def kinv2_rhs(psi, m0, t, W, period=TWO_PI):
    """Right-hand side of the ``k^{-2}`` equation, ``psi = 1/phi``."""
    ps, pss = arc_derivatives(psi, m0, t, period)
    return psi * pss - 0.5 * ps * ps + 2.0 * psi + 4.0 * W * psi * psi


def cfl_k2(field, cfl=0.2):
    """Explicit step limit ``cfl * phi * (m0 e^t du)^2`` for diffusion ``1/phi``.

    ``du = pi / kmax`` is the grid spacing seen by the highest resolved mode.
    """
    ops = _ops(field.n_samples, field.period)
    du = np.pi / ops.kmax
    return float(cfl * np.min(field.phi * (field.metric * du) ** 2))


def _check_floor(phi, t, phi_floor):
    bad = np.flatnonzero(~(phi >= phi_floor))
    if bad.size:
        j = int(bad[np.argmin(phi[bad])]) if np.all(np.isfinite(phi[bad])) else int(bad[0])
        raise SingularityError(
            f"{BREAKDOWN}: k^2 = {phi[j]:.3g} below floor {phi_floor:g} at sample {j}, t = {t:.6g}",
            time=t,
            index=j,
        )


def step_k2(field, W, dt, phi_floor=1e-6):
    """One explicit RK4 step of the ``k^2`` equation.

    Raises
    ------
    SingularityError
        ``phi`` dropped below ``phi_floor`` in any stage.
    """
    W = _webster(W)
    if dt == 0:
        return field
    phi, m0, t, P = field.phi, field.m0, field.t, field.period
    _check_floor(phi, t, phi_floor)
    k1 = k2_rhs(phi, m0, t, W, P)
    s = phi + 0.5 * dt * k1
    _check_floor(s, t + 0.5 * dt, phi_floor)
    k2 = k2_rhs(s, m0, t + 0.5 * dt, W, P)
    s = phi + 0.5 * dt * k2
    _check_floor(s, t + 0.5 * dt, phi_floor)
    k3 = k2_rhs(s, m0, t + 0.5 * dt, W, P)
    s = phi + dt * k3
    _check_floor(s, t + dt, phi_floor)
    k4 = k2_rhs(s, m0, t + dt, W, P)
    new = phi + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    _check_floor(new, t + dt, phi_floor)
    return field.with_phi(new, t + dt)


@dataclass(frozen=True)
class K2Config:
    """Stepping parameters; ``dt`` is an upper bound refined by the CFL limit."""

    dt: float = 1e-3
    t_end: float = 1.0
    n_outputs: int = 11
    output_times: tuple = None
    phi_floor: float = 1e-6
    cfl_safety: float = 0.2

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt!r}")
        if not self.t_end >= 0:
            raise ValueError(f"t_end must be nonnegative, got {self.t_end!r}")
        if not 0 < self.cfl_safety <= 0.28:
            raise ValueError("cfl_safety must lie in (0, 0.28] for RK4 on this diffusion")

    def times(self):
        if self.output_times is not None:
            ts = np.asarray(self.output_times, dtype=float)
            if ts[0] != 0.0 or np.any(np.diff(ts) <= 0):
                raise ValueError("output_times must start at 0 and increase")
            return ts
        if self.t_end == 0:
            return np.array([0.0])
        return np.linspace(0.0, self.t_end, max(2, self.n_outputs))


@dataclass
class BoundMonitor:
    """Thresholds and recorded violations of the a priori bounds.

    ``c0`` bounds ``max k^2`` for all time; ``C0`` bounds ``max k^{-2}``
    when ``W < 0`` (None otherwise).
    """

    c0: float
    C0: float = None
    violations: list = field(default_factory=list)
    fitted_limit_phi: float = None
    fitted_limit_dphi: float = None

    @property
    def ok(self):
        return not self.violations


@dataclass
class K2Trajectory:
    times: np.ndarray
    fields: list
    W: float
    monitor: BoundMonitor = None

    def __len__(self):
        return len(self.fields)

    @property
    def final(self):
        return self.fields[-1]

    def phi_array(self):
        return np.array([f.phi for f in self.fields])


def evolve_k2(field, W, config=None):
    """Integrate the ``k^2`` equation and evaluate the bound monitor.

    Steps are ``min(dt, CFL, time to next output)``.  On breakdown the
    :class:`SingularityError` carries the partial trajectory as
    ``err.trajectory``.
    """
    config = config or K2Config()
    Wv = _webster(W)
    times = config.times()
    fields = [field]
    cur = field
    for t_out in times[1:]:
        while cur.t < t_out - 1e-14 * max(1.0, t_out):
            h = min(config.dt, t_out - cur.t, cfl_k2(cur, config.cfl_safety))
            try:
                cur = step_k2(cur, Wv, h, config.phi_floor)
            except SingularityError as err:
                done = times[: len(fields)]
                err.trajectory = K2Trajectory(done, fields, Wv, _monitor_from_fields(done, fields, Wv))
                raise
        cur = cur.with_phi(cur.phi, float(t_out))
        fields.append(cur)
    traj = K2Trajectory(times, fields, Wv)
    traj.monitor = bound_monitor_eval(traj, Wv)
    return traj


def homogeneous_oracle(phi0, W, t):
    """Exact spatially constant solution ``(phi0 + 2W) e^{-2t} - 2W``."""
    W = _webster(W)
    return (phi0 + 2.0 * W) * np.exp(-2.0 * np.asarray(t, dtype=float)) - 2.0 * W


def homogeneous_breakdown_time(phi0, W):
    """Time at which the homogeneous solution reaches zero (inf if never)."""
    W = _webster(W)
    if W <= 0:
        return np.inf
    return 0.5 * np.log((phi0 + 2.0 * W) / (2.0 * W))


def residual_eq43(traj):
    """Consistency of a trajectory with both curvature equations.

    Centered time differences at interior outputs (uniform spacing required)
    minus the spatial right-hand side.

    Returns
    -------
    dict
        ``times``, ``k2`` (sup residual of the ``k^2`` equation) and
        ``kinv2`` (same for ``k^{-2}``).  Both are second order in the
        output spacing; pointwise the second is ``-phi^{-2}`` times the
        first up to differencing error.
    """
    ts = np.asarray(traj.times, dtype=float)
    if ts.size < 3:
        raise ValueError("need at least three output times")
    steps = np.diff(ts)
    if np.ptp(steps) > 1e-9 * steps[0]:
        raise ValueError("residual_eq43 needs uniformly spaced output times")
    h = steps[0]
    W = traj.W
    out_t, r43, r44 = [], [], []
    for i in range(1, ts.size - 1):
        f = traj.fields[i]
        dphi = (traj.fields[i + 1].phi - traj.fields[i - 1].phi) / (2.0 * h)
        dpsi = (1.0 / traj.fields[i + 1].phi - 1.0 / traj.fields[i - 1].phi) / (2.0 * h)
        res43 = dphi - k2_rhs(f.phi, f.m0, f.t, W, f.period)
        res44 = dpsi - kinv2_rhs(1.0 / f.phi, f.m0, f.t, W, f.period)
        out_t.append(ts[i])
        r43.append(float(np.max(np.abs(res43))))
        r44.append(float(np.max(np.abs(res44))))
    return {"times": np.array(out_t), "k2": np.array(r43), "kinv2": np.array(r44)}


def _fit_limit(ts, values):
    # values ~ a + b e^{-2t} over the last third of the run
    m = max(3, ts.size // 3)
    t, v = ts[-m:], values[-m:]
    A = np.column_stack([np.ones_like(t), np.exp(-2.0 * t)])
    coef, *_ = np.linalg.lstsq(A, v, rcond=None)
    return float(coef[0])


def bound_monitor_eval(traj, W=None):
    """Check the a priori bounds at every output time.

    Recorded as violations (time, quantity, value, bound):

    * ``max phi <= c0`` with ``c0 = max(2|W|, max phi0)``;
    * ``max 1/phi <= C0 = max 1/phi0 + 1/(2|W|)`` when ``W < 0``;
    * ``W = 0``: ``e^{2t} max phi`` nonincreasing and at most ``max phi0``;
    * ``W < 0``: ``(e^{-2t} max g0 + 1/(2|W|))^{-1} <= phi <= e^{-2t} max f0 - 2W``
      with ``f0 = phi0 + 2W`` and ``g0 = 1/phi0 - 1/(2|W|)``.

    Runs with at least six outputs and ``t_end >= 3`` also get fitted limits
    of ``phi`` and of ``max |phi_s|`` from a ``a + b e^{-2t}`` regression.
    """
    W = traj.W if W is None else _webster(W)
    return _monitor_from_fields(np.asarray(traj.times), traj.fields, W)


def _monitor_from_fields(times, fields, W, rtol=1e-6):
    phi0 = fields[0].phi
    c0 = max(2.0 * abs(W), float(np.max(phi0)))
    C0 = float(np.max(1.0 / phi0)) + 1.0 / (2.0 * abs(W)) if W < 0 else None
    mon = BoundMonitor(c0, C0)

    def check(t, name, value, bound, upper=True):
        tol = rtol * max(abs(bound), 1e-300)
        bad = value > bound + tol if upper else value < bound - tol
        if bad:
            mon.violations.append((float(t), name, float(value), float(bound)))

    f0max = float(np.max(phi0 + 2.0 * W))
    inv0max = float(np.max(1.0 / phi0))
    prev = None
    for t, f in zip(times, fields):
        pmax, pmin = float(np.max(f.phi)), float(np.min(f.phi))
        check(t, "max_phi<=c0", pmax, c0)
        if W < 0:
            check(t, "max_inv_phi<=C0", 1.0 / pmin, C0)
            check(t, "sandwich_upper", pmax, np.exp(-2.0 * t) * f0max - 2.0 * W)
            # same bound with both denominator terms >= 0, finite for tiny |W|
            e = np.exp(-2.0 * t)
            lower = 2.0 * abs(W) / (-np.expm1(-2.0 * t) + e * 2.0 * abs(W) * inv0max)
            check(t, "sandwich_lower", pmin, lower, upper=False)
        if W == 0:
            scaled = np.exp(2.0 * t) * pmax
            check(t, "e2t_max_phi<=max_phi0", scaled, float(np.max(phi0)))
            if prev is not None:
                check(t, "e2t_max_phi_monotone", scaled, prev)
            prev = scaled
    ts = np.asarray(times, dtype=float)
    if ts.size >= 6 and ts[-1] >= 3.0:
        mon.fitted_limit_phi = _fit_limit(ts, np.array([np.mean(f.phi) for f in fields]))
        dmax = np.array(
            [np.max(np.abs(arc_derivatives(f.phi, f.m0, f.t, f.period)[0])) for f in fields]
        )
        mon.fitted_limit_dphi = _fit_limit(ts, dmax)
    return mon
