"""Plain-text file formats.

Curve files::

    legflow-curve v1
    # optional comment lines (a creation timestamp by default)
    n=<int> holonomy=<float> [planar=true]
    <u> <x> <y> <z>        n rows; planar files omit z

Support files hold ``legflow-support v1`` and rows ``m a_m b_m``.  Field
files hold ``legflow-field v1``, a header ``n=.. W=.. t=.. period=..`` and
rows ``u m0 phi``.  Floats are written with 17 significant digits, so a
save/load round trip reproduces every sample exactly.
"""

import csv
import datetime
import os

import numpy as np

from .errors import ParseError
from .heis_core import DiscreteClosedCurve, check_holonomy
from .imcf_planar import SupportFunction
from .intrinsic_flow import CurvatureField
from .planar import PlanarCurve
from .spectral import uniform_grid

CURVE_MAGIC = "legflow-curve v1"
SUPPORT_MAGIC = "legflow-support v1"
FIELD_MAGIC = "legflow-field v1"
DIAGNOSTIC_COLUMNS = (
    "t", "length", "kmin", "kmax", "leg_residual", "minkowski", "total_curvature", "holonomy"
)


def _fmt(v):
    return format(float(v), ".17g")


def _stamp(timestamp):
    if not timestamp:
        return []
    now = datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0)
    return [f"# created {now.isoformat()}"]


def _content_lines(path):
    """Yield ``(lineno, text)`` for non-blank, non-comment lines."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read().splitlines()
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from exc
    for i, line in enumerate(raw, start=1):
        text = line.strip()
        if text and not text.startswith("#"):
            yield i, text


def _header(lines, magic, path):
    try:
        lineno, text = next(lines)
    except StopIteration:
        raise ParseError(f"{path}: empty file", 1) from None
    if text != magic:
        raise ParseError(f"expected {magic!r}, found {text!r}", lineno)
    try:
        lineno, text = next(lines)
    except StopIteration:
        raise ParseError("missing header line", lineno + 1) from None
    fields = {}
    for item in text.split():
        key, sep, val = item.partition("=")
        if not sep:
            raise ParseError(f"bad header item {item!r}", lineno)
        fields[key] = val
    return lineno, fields


def _rows(lines, count, width, last_lineno, what):
    out = np.empty((count, width))
    lineno = last_lineno
    for j in range(count):
        try:
            lineno, text = next(lines)
        except StopIteration:
            raise ParseError(f"expected {count} {what} rows, file ends after {j}", lineno + 1) from None
        parts = text.split()
        if len(parts) != width:
            raise ParseError(f"expected {width} columns, found {len(parts)}", lineno)
        try:
            out[j] = [float(p) for p in parts]
        except ValueError:
            raise ParseError(f"non-numeric value in {text!r}", lineno) from None
    extra = next(lines, None)
    if extra is not None:
        raise ParseError("unexpected data after the last row", extra[0])
    return out


def _header_int(fields, key, lineno):
    try:
        return int(fields[key])
    except (KeyError, ValueError):
        raise ParseError(f"header needs an integer {key}=", lineno) from None


def _header_float(fields, key, lineno, default=None):
    if key not in fields:
        if default is None:
            raise ParseError(f"header needs {key}=", lineno)
        return default
    try:
        return float(fields[key])
    except ValueError:
        raise ParseError(f"header {key}= is not a number", lineno) from None


def save_curve(curve, path, timestamp=True):
    """Write a :class:`DiscreteClosedCurve` or :class:`PlanarCurve`."""
    planar = isinstance(curve, PlanarCurve)
    n = curve.n_samples
    u = uniform_grid(n)
    lines = [CURVE_MAGIC] + _stamp(timestamp)
    if planar:
        lines.append(f"n={n} holonomy=0 planar=true")
        lines += [f"{_fmt(u[j])} {_fmt(p[0])} {_fmt(p[1])}" for j, p in enumerate(curve.points)]
    else:
        lines.append(f"n={n} holonomy={_fmt(curve.vertical_holonomy)}")
        lines += [" ".join(_fmt(v) for v in (u[j], *p)) for j, p in enumerate(curve.points)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_curve(path, check=True):
    """Read a curve file.

    Raises
    ------
    ParseError
        Version mismatch or malformed rows; the message names the line.
    HolonomyMismatchError
        Declared holonomy contradicts the z samples (``check=True``).
    """
    lines = _content_lines(path)
    lineno, fields = _header(lines, CURVE_MAGIC, path)
    n = _header_int(fields, "n", lineno)
    holonomy = _header_float(fields, "holonomy", lineno, 0.0)
    planar = fields.get("planar", "false") == "true"
    rows = _rows(lines, n, 3 if planar else 4, lineno, "sample")
    grid = uniform_grid(n)
    off = np.flatnonzero(np.abs(rows[:, 0] - grid) > 1e-12)
    if off.size:
        raise ParseError(f"u column is not the uniform grid j/{n} at row {off[0] + 1}", lineno + 1 + off[0])
    try:
        if planar:
            return PlanarCurve(rows[:, 1:])
        curve = DiscreteClosedCurve(rows[:, 1:], holonomy)
    except ValueError as exc:
        raise ParseError(str(exc)) from exc
    if check:
        check_holonomy(curve)
    return curve


def save_support(h, path, timestamp=True):
    lines = [SUPPORT_MAGIC] + _stamp(timestamp) + [f"n_max={h.n_max}"]
    for m in range(h.n_max + 1):
        lines.append(f"{m} {_fmt(h.fourier_cos[m])} {_fmt(h.fourier_sin[m])}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_support(path):
    lines = _content_lines(path)
    lineno, fields = _header(lines, SUPPORT_MAGIC, path)
    n_max = _header_int(fields, "n_max", lineno)
    rows = _rows(lines, n_max + 1, 3, lineno, "mode")
    if np.any(rows[:, 0] != np.arange(n_max + 1)):
        raise ParseError("mode column must read 0, 1, ..., n_max", lineno + 1)
    return SupportFunction(rows[:, 1].copy(), rows[:, 2].copy())


def save_field(field, W, path, timestamp=True):
    lines = [FIELD_MAGIC] + _stamp(timestamp)
    lines.append(
        f"n={field.n_samples} W={_fmt(W)} t={_fmt(field.t)} period={_fmt(field.period)}"
    )
    u = field.u_grid
    lines += [f"{_fmt(u[j])} {_fmt(field.m0[j])} {_fmt(field.phi[j])}" for j in range(field.n_samples)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_field(path):
    """Returns ``(CurvatureField, W)``."""
    lines = _content_lines(path)
    lineno, fields = _header(lines, FIELD_MAGIC, path)
    n = _header_int(fields, "n", lineno)
    W = _header_float(fields, "W", lineno)
    t = _header_float(fields, "t", lineno, 0.0)
    period = _header_float(fields, "period", lineno, 2.0 * np.pi)
    rows = _rows(lines, n, 3, lineno, "field")
    try:
        return CurvatureField(rows[:, 2], rows[:, 1], t, period), W
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def write_diagnostics_csv(traj, path, extra=None):
    """Per-time diagnostics; planar runs carry only the columns they have.

    ``extra`` maps further column names to per-time sequences.
    """
    first = traj.diagnostics[0] if traj.diagnostics else {}
    cols = [c for c in DIAGNOSTIC_COLUMNS[1:] if c in first]
    extra = extra or {}
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t"] + cols + list(extra))
        for i, (t, d) in enumerate(zip(traj.times, traj.diagnostics)):
            row = [_fmt(t)] + [_fmt(d[c]) for c in cols] + [_fmt(v[i]) for v in extra.values()]
            writer.writerow(row)


def read_diagnostics_csv(path):
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    return {c: np.array([float(r[c]) for r in rows]) for c in rows[0]} if rows else {}


def write_trajectory(traj, directory, timestamp=True):
    """One ``state_XXXX.curve`` per output time plus ``diagnostics.csv``."""
    os.makedirs(directory, exist_ok=True)
    names = []
    for i, state in enumerate(traj.states):
        name = f"state_{i:04d}.curve"
        save_curve(state, os.path.join(directory, name), timestamp)
        names.append(name)
    write_diagnostics_csv(traj, os.path.join(directory, "diagnostics.csv"))
    return names
