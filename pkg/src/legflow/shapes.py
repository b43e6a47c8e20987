"""Synthetic initial data: planar seeds, their Legendrian lifts, and k^2 fields.

Text specs used by the command line:

``circle:R``                  circle of radius R about the origin
``translated:CX,CY``          unit circle centered at (CX, CY)
``ellipse:A,B``               axis-aligned ellipse
``support:c0=1,c2=0.1,s3=..`` convex curve from cosine/sine support modes
``doubleloop:EPS``            turning-number-two curve, support 1 + EPS cos(theta/2)
``helix:K`` or ``helix:K,TURNS``   closed-projection geodesic
``noise:AMP``                 unit circle with seeded random low modes

``phi0`` specs: ``const:C``, ``sin:A`` (``1 + A sin u``), ``cos:A,M``.
"""

import numpy as np

from .geodesics import make_helix
from .heis_core import legendrian_lift
from .imcf_planar import SupportFunction, support_to_curve
from .planar import PlanarCurve
from .spectral import uniform_grid

TWO_PI = 2.0 * np.pi


def circle(n=256, radius=1.0, center=(0.0, 0.0)):
    phi = TWO_PI * uniform_grid(n)
    pts = np.column_stack([center[0] + radius * np.cos(phi), center[1] + radius * np.sin(phi)])
    return PlanarCurve(pts)


def ellipse(n=256, a=1.0, b=0.7):
    phi = TWO_PI * uniform_grid(n)
    return PlanarCurve(np.column_stack([a * np.cos(phi), b * np.sin(phi)]))


def double_loop(n=256, eps=0.5):
    """Curve with support ``1 + eps cos(theta/2)`` over ``theta in [0, 4 pi)``.

    Radius of curvature ``1 + (3/4) eps cos(theta/2)`` stays positive for
    ``eps < 4/3``, so the curvature never vanishes, yet the tangent turns
    twice and the curve crosses itself.
    """
    if not 0 <= eps < 4.0 / 3.0:
        raise ValueError(f"eps must lie in [0, 4/3), got {eps!r}")
    th = 2.0 * TWO_PI * uniform_grid(n)
    h = 1.0 + eps * np.cos(0.5 * th)
    hp = -0.5 * eps * np.sin(0.5 * th)
    c, s = np.cos(th), np.sin(th)
    return PlanarCurve(np.column_stack([h * c - hp * s, h * s + hp * c]))


def noisy_circle(n=256, amp=0.05, seed=0, n_modes=6):
    """Unit circle with radial perturbation from seeded random Fourier modes."""
    rng = np.random.default_rng(seed)
    phi = TWO_PI * uniform_grid(n)
    r = np.ones(n)
    for m in range(2, 2 + n_modes):
        a, b = rng.normal(size=2) * amp / m
        r += a * np.cos(m * phi) + b * np.sin(m * phi)
    return PlanarCurve(np.column_stack([r * np.cos(phi), r * np.sin(phi)]))


def h0_cos2():
    return SupportFunction.from_modes({0: (1.0, 0.0), 2: (0.1, 0.0)})


def h0_multi():
    return SupportFunction.from_modes({0: (1.0, 0.0), 2: (0.0, 0.03), 3: (0.05, 0.0)})


def h0_ellipse_like():
    return SupportFunction.from_modes({0: (1.0, 0.0), 2: (0.08, 0.04), 4: (0.01, 0.0)})


CONVEX_SEEDS = {"cos2": h0_cos2, "multi": h0_multi, "mixed": h0_ellipse_like}


def corpus(n=256):
    """Five Legendrian test curves keyed by name.

    Turning number one except ``double_loop``.
    """
    return {
        "unit_circle": legendrian_lift(circle(n)),
        "translated_circle": legendrian_lift(circle(n, center=(0.7, -0.4)), 0.25),
        "support_cos2": legendrian_lift(support_to_curve(h0_cos2(), n)),
        "support_multi": legendrian_lift(support_to_curve(h0_multi(), n), -0.5),
        "double_loop": legendrian_lift(double_loop(n)),
    }


# --------------------------------------------------------------------------
# text specs


def _floats(text, count=None, name="shape"):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ValueError(f"bad numbers in {name} spec {text!r}") from exc
    if count is not None and len(vals) not in count:
        raise ValueError(f"{name} spec {text!r} expects {sorted(count)} values")
    return vals


def parse_support(text):
    """``c0=1,c2=0.1,s3=0.05`` to a :class:`SupportFunction`."""
    modes = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            key, val = item.split("=")
            kind, m = key[0], int(key[1:])
            val = float(val)
        except ValueError as exc:
            raise ValueError(f"bad support mode {item!r}; expected cM=VALUE or sM=VALUE") from exc
        if kind not in "cs" or m < 0:
            raise ValueError(f"bad support mode {item!r}")
        a, b = modes.get(m, (0.0, 0.0))
        modes[m] = (val, b) if kind == "c" else (a, val)
    if 0 not in modes:
        raise ValueError("support spec needs a constant term c0")
    return SupportFunction.from_modes(modes)


def planar_from_spec(spec, n=256, seed=0):
    kind, _, args = spec.partition(":")
    if kind == "circle":
        (r,) = _floats(args or "1", {1})
        return circle(n, r)
    if kind == "translated":
        cx, cy = _floats(args, {2})
        return circle(n, 1.0, (cx, cy))
    if kind == "ellipse":
        a, b = _floats(args, {2})
        return ellipse(n, a, b)
    if kind == "support":
        h = parse_support(args)
        h.check_convex()
        return support_to_curve(h, n)
    if kind == "doubleloop":
        (eps,) = _floats(args or "0.5", {1})
        return double_loop(n, eps)
    if kind == "noise":
        (amp,) = _floats(args or "0.05", {1})
        return noisy_circle(n, amp, seed)
    raise ValueError(f"unknown shape {kind!r}")


def curve_from_spec(spec, n=256, seed=0):
    """Legendrian curve from a text spec (planar seeds are lifted with z(0)=0)."""
    kind, _, args = spec.partition(":")
    if kind == "helix":
        vals = _floats(args, {1, 2})
        turns = int(vals[1]) if len(vals) == 2 else 1
        return make_helix(vals[0], n_turns=turns, n_samples=n)
    return legendrian_lift(planar_from_spec(spec, n, seed))


def phi0_from_spec(spec, n=256, period=TWO_PI):
    """Initial ``k^2`` samples on ``[0, period)``."""
    kind, _, args = spec.partition(":")
    u = uniform_grid(n, period)
    if kind == "const":
        (c,) = _floats(args, {1}, "phi0")
        phi = np.full(n, c)
    elif kind == "sin":
        (a,) = _floats(args, {1}, "phi0")
        phi = 1.0 + a * np.sin(TWO_PI * u / period)
    elif kind == "cos":
        a, m = _floats(args, {2}, "phi0")
        phi = 1.0 + a * np.cos(int(m) * TWO_PI * u / period)
    else:
        raise ValueError(f"unknown phi0 spec {kind!r}")
    if not np.all(phi > 0):
        raise ValueError(f"phi0 {spec!r} is not positive everywhere")
    return phi
