"""Integral identities and conservation laws as assertable checks.

All integrals are taken over one period in ``u``; the integrands involve
only the projection, its derivatives and the horizontal position pairing,
so a nonzero vertical holonomy does not matter.  Tolerances scale with the
curve length where the quantity has units of length.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .heis_core import horizontality_residual
from .planar import PlanarCurve, planar_frame
from .spectral import periodic_integral


@dataclass(frozen=True)
class IdentityReport:
    """Outcome of one identity check.

    ``passed`` is ``|value - target| <= tolerance``.
    """

    name: str
    value: float
    tolerance: float
    target: float = 0.0
    time: float = None
    curve_id: str = None
    passed: bool = field(init=False)

    def __post_init__(self):
        ok = bool(abs(self.value - self.target) <= self.tolerance)
        object.__setattr__(self, "passed", ok)

    def as_row(self):
        return {
            "name": self.name,
            "time": "" if self.time is None else f"{self.time:.17g}",
            "curve_id": self.curve_id or "",
            "value": f"{self.value:.17g}",
            "target": f"{self.target:.17g}",
            "tolerance": f"{self.tolerance:.6g}",
            "passed": "pass" if self.passed else "FAIL",
        }


def _projection(curve):
    return curve if isinstance(curve, PlanarCurve) else curve.projection()


def _pairing_and_frame(curve):
    proj = _projection(curve)
    frame = planar_frame(proj)
    t = frame["tangent"]
    # g(gamma, J gamma_s) with J gamma_s = -t_y X1 + t_x X2
    pairing = proj.y * t[:, 0] - proj.x * t[:, 1]
    return pairing, frame


def minkowski_integrand(curve):
    """``1 + k g(gamma, J gamma_s)`` at each sample."""
    pairing, frame = _pairing_and_frame(curve)
    return 1.0 + frame["k"] * pairing


def minkowski_residual(curve):
    """``int (1 + k g(gamma, J gamma_s)) ds`` over one period.

    Vanishes for every closed regular curve with nonvanishing curvature.
    On the centered unit circle the integrand is zero pointwise.
    """
    pairing, frame = _pairing_and_frame(curve)
    return float(periodic_integral((1.0 + frame["k"] * pairing) * frame["speed"]))


def total_curvature(curve):
    """``int k ds``, i.e. ``2 pi`` times the tangent winding number."""
    frame = planar_frame(_projection(curve))
    return float(periodic_integral(frame["k"] * frame["speed"]))


def vertical_identity_residual(curve):
    """Sup of ``|d/ds g(gamma, T) - g(gamma, J gamma_s)|``.

    Here ``g(gamma, T) = z``; the identity is horizontality divided by speed.
    """
    pairing, frame = _pairing_and_frame(curve)
    z_s = curve.z_derivative() / frame["speed"]
    return float(np.max(np.abs(z_s - pairing)))


# --------------------------------------------------------------------------


def _length_law(traj, reports, tol):
    L = traj.diagnostic("length")
    for t, Lt in zip(traj.times, L):
        val = np.log(Lt) - np.log(L[0]) - t
        reports.append(IdentityReport("length_law", float(val), tol, time=float(t)))


def _rescaled_length(traj, reports, tol):
    L = traj.diagnostic("length")
    for t, Lt in zip(traj.times, L):
        reports.append(
            IdentityReport("length_constant", float((Lt - L[0]) / L[0]), tol, time=float(t))
        )


def _length_derivative(traj, reports, rtol):
    # dL/dt = int (1 + k g(gamma, J gamma_s)) ds, with dL/dt by a three-point
    # stencil; the pointwise form needs the flow without its tangential term
    times, L = traj.times, traj.diagnostic("length")
    for i in range(1, len(times) - 1):
        h0, h1 = times[i] - times[i - 1], times[i + 1] - times[i]
        dLdt = (
            -h1 / (h0 * (h0 + h1)) * L[i - 1]
            + (h1 - h0) / (h0 * h1) * L[i]
            + h0 / (h1 * (h0 + h1)) * L[i + 1]
        )
        err = float(dLdt - minkowski_residual(traj.states[i]))
        tol = (rtol + max(h0, h1) ** 2) * L[i]
        reports.append(IdentityReport("length_derivative", err, tol, time=float(times[i])))


def conservation_suite(traj, kind=None, curve_id=None):
    """Evaluate the conservation laws at every output time.

    Parameters
    ----------
    traj : FlowTrajectory
        Output of the expanding flow or its rescaling.
    kind : {"expanding", "rescaled"}, optional
        Defaults to ``traj.kind``.

    Returns
    -------
    list of IdentityReport
        Expanding runs check ``log L(t) - log L(0) = t`` (tolerance 1e-3),
        horizontality, the vertical identity, Minkowski and total-curvature
        constancy.  Rescaled runs swap the length law for length constancy
        (1e-6) and add the length-derivative identity.
    """
    kind = kind or traj.kind
    if kind not in ("expanding", "rescaled"):
        raise ValueError(f"unknown trajectory kind {kind!r}")
    reports = []
    if kind == "expanding":
        _length_law(traj, reports, 1e-3)
    else:
        _rescaled_length(traj, reports, 1e-6)
    tc0 = total_curvature(traj.states[0])
    for i, (t, state) in enumerate(zip(traj.times, traj.states)):
        t = float(t)
        L = state.length
        if traj.diagnostics:
            leg = traj.diagnostics[i]["leg_residual"]
        else:
            leg = horizontality_residual(state, check=False).max_abs
        vert = vertical_identity_residual(state)
        reports += [
            IdentityReport("legendrian", leg, 1e-8 * L, time=t),
            IdentityReport("vertical_identity", vert, 1e-8 * max(1.0, L), time=t),
            IdentityReport("minkowski", minkowski_residual(state), 1e-6 * L, time=t),
            IdentityReport("total_curvature", total_curvature(state), 1e-6, target=tc0, time=t),
        ]
    if kind == "rescaled" and len(traj) >= 3:
        _length_derivative(traj, reports, 1e-6)
    if curve_id is not None:
        reports = [
            IdentityReport(r.name, r.value, r.tolerance, r.target, r.time, curve_id) for r in reports
        ]
    return reports


REPORT_COLUMNS = ("name", "time", "curve_id", "value", "target", "tolerance", "passed")


def reports_to_csv(reports, path=None):
    """Write reports as CSV; returns the text when ``path`` is None."""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=REPORT_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.as_row())
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def summarize(reports):
    """One line per identity name with the worst case and a pass count."""
    lines = []
    names = list(dict.fromkeys(r.name for r in reports))
    for name in names:
        group = [r for r in reports if r.name == name]
        worst = max(group, key=lambda r: abs(r.value - r.target) / max(r.tolerance, 1e-300))
        n_ok = sum(r.passed for r in group)
        status = "pass" if n_ok == len(group) else "FAIL"
        lines.append(
            f"{status:4s} {name:18s} {n_ok}/{len(group)}  worst |dev|="
            f"{abs(worst.value - worst.target):.3e} (tol {worst.tolerance:.1e})"
        )
    return "\n".join(lines)
