"""Static SVG figures written as text.

Output depends only on the data, so files are byte-for-byte reproducible.
"""

import numpy as np

from .diagnostics import IdentityReport
from .intrinsic_flow import K2Trajectory, arc_derivatives
from .trajectory import FlowTrajectory

WIDTH, HEIGHT, PAD = 480, 360, 40
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b")


def _num(v):
    return f"{v:.2f}"


def _svg(body, title):
    head = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">\n'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>\n'
        f'<text x="{WIDTH // 2}" y="20" text-anchor="middle" font-family="sans-serif" '
        f'font-size="13">{title}</text>\n'
    )
    return head + "".join(body) + "</svg>\n"


def _polyline(xs, ys, color, closed=False, width=1.2):
    pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in zip(xs, ys))
    tag = "polygon" if closed else "polyline"
    return f'<{tag} points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>\n'


def _label(x, y, text, anchor="start", size=10):
    return (
        f'<text x="{_num(x)}" y="{_num(y)}" text-anchor="{anchor}" '
        f'font-family="sans-serif" font-size="{size}">{text}</text>\n'
    )


def projections_svg(curves, title="xy projections"):
    """Overlay planar projections with a shared, aspect-preserving scale."""
    pts = [np.asarray(c.points)[:, :2] for c in curves]
    allp = np.vstack(pts)
    lo, hi = allp.min(axis=0), allp.max(axis=0)
    span = max(float(np.max(hi - lo)), 1e-12)
    scale = min(WIDTH, HEIGHT - 20) - 2 * PAD
    cx, cy = 0.5 * (lo + hi)
    body = []
    for i, p in enumerate(pts):
        xs = WIDTH / 2 + (p[:, 0] - cx) / span * scale
        ys = (HEIGHT + 20) / 2 - (p[:, 1] - cy) / span * scale
        body.append(_polyline(xs, ys, PALETTE[i % len(PALETTE)], closed=True))
    return _svg(body, title)


def series_svg(x, series, title="", logy=True, logx=False, xlabel="t"):
    """Line plot of named series against ``x``; nonpositive values are dropped on log axes."""
    x = np.asarray(x, dtype=float)
    body = []
    prepared = []
    for name, y in series.items():
        y = np.asarray(y, dtype=float)
        keep = np.isfinite(y) & ((y > 0) if logy else True) & ((x > 0) if logx else True)
        if keep.sum() >= 1:
            xv, yv = x[keep], y[keep]
            prepared.append((name, np.log10(xv) if logx else xv, np.log10(yv) if logy else yv))
    if not prepared:
        return _svg([_label(PAD, HEIGHT / 2, "no plottable data")], title)
    xall = np.concatenate([p[1] for p in prepared])
    yall = np.concatenate([p[2] for p in prepared])
    x0, x1 = float(xall.min()), float(xall.max())
    y0, y1 = float(yall.min()), float(yall.max())
    x1 = x1 if x1 > x0 else x0 + 1.0
    if y1 - y0 < 1e-12:
        y0, y1 = y0 - 0.5, y1 + 0.5
    w, h = WIDTH - 2 * PAD, HEIGHT - 2 * PAD - 10

    def sx(v):
        return PAD + (v - x0) / (x1 - x0) * w

    def sy(v):
        return HEIGHT - PAD - (v - y0) / (y1 - y0) * h

    body.append(_polyline([PAD, PAD, PAD + w], [HEIGHT - PAD - h, HEIGHT - PAD, HEIGHT - PAD], "black", width=1))
    ylab = "log10" if logy else ""
    body.append(_label(PAD - 4, sy(y1) + 4, f"{ylab} {y1:.3g}".strip(), "end", 9))
    body.append(_label(PAD - 4, sy(y0), f"{ylab} {y0:.3g}".strip(), "end", 9))
    xl = "log10 " + xlabel if logx else xlabel
    body.append(_label(PAD, HEIGHT - PAD + 14, f"{x0:.3g}", "middle", 9))
    body.append(_label(PAD + w, HEIGHT - PAD + 14, f"{x1:.3g}", "middle", 9))
    body.append(_label(PAD + w / 2, HEIGHT - 8, xl, "middle", 10))
    for i, (name, xv, yv) in enumerate(prepared):
        color = PALETTE[i % len(PALETTE)]
        body.append(_polyline(sx(xv), sy(yv), color))
        body.append(_label(PAD + w - 4, PAD + 14 * (i + 1), name, "end", 10).replace(
            "<text ", f'<text fill="{color}" '))
    return _svg(body, title)


def emit_plot(obj, path):
    """Write an SVG summary of a trajectory or a list of identity reports.

    * :class:`FlowTrajectory` - overlaid projections of every state;
    * :class:`K2Trajectory` - mean, min and max of ``k^2`` on a log-time axis;
    * list of :class:`IdentityReport` - ``|value - target|`` against time.
    """
    if isinstance(obj, FlowTrajectory):
        if not obj.states:
            raise ValueError("empty trajectory")
        text = projections_svg(obj.states, f"{obj.kind} flow, t in [0, {obj.times[-1]:g}]")
    elif isinstance(obj, K2Trajectory):
        phis = obj.phi_array()
        t = np.asarray(obj.times)
        dphi = [np.max(np.abs(arc_derivatives(f.phi, f.m0, f.t, f.period)[0])) for f in obj.fields]
        series = {
            "mean k^2": phis.mean(axis=1),
            "min k^2": phis.min(axis=1),
            "max k^2": phis.max(axis=1),
            "max |d_s k^2|": dphi,
        }
        text = series_svg(t, series, f"k^2 evolution, W = {obj.W:g}", logy=True, logx=True)
    else:
        reports = list(obj)
        if not reports or not all(isinstance(r, IdentityReport) for r in reports):
            raise ValueError("emit_plot needs a trajectory or a non-empty list of IdentityReport")
        names = list(dict.fromkeys(r.name for r in reports))
        timed = [r for r in reports if r.time is not None]
        if timed:
            t = sorted({r.time for r in timed})
            series = {}
            for name in names:
                by_t = {r.time: abs(r.value - r.target) for r in timed if r.name == name}
                series[name] = [by_t.get(tt, np.nan) for tt in t]
            text = series_svg(t, series, "identity residuals")
        else:
            idx = np.arange(len(reports), dtype=float)
            text = series_svg(idx, {"|dev|": [abs(r.value - r.target) for r in reports]},
                              "identity residuals", xlabel="report")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
    return path
