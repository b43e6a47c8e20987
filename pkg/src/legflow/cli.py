"""Command-line driver.

Exit codes: 0 success, 1 usage, input or verification failure, 2 flow
singularity (a report is written to the output directory).

``LEGFLOW_THREADS`` caps the worker threads used for independent
verification items.
"""

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import io
from .diagnostics import (
    IdentityReport,
    conservation_suite,
    minkowski_residual,
    reports_to_csv,
    summarize,
    total_curvature,
    vertical_identity_residual,
)
from .errors import LegflowError, SingularityError
from .flow3d import evolve_expanding, rescale_trajectory
from .geodesics import (
    fit_helix,
    geodesic_residual,
    make_helix,
    make_horizontal_line,
    open_curve_frame,
    variation_ode_check,
)
from .heis_core import curvature_of, horizontality_residual, legendrian_lift
from .imcf_planar import SolverConfig, evolve_planar, evolve_support_exact, hausdorff_distance
from .imcf_planar import support_to_curve
from .intrinsic_flow import (
    CurvatureField,
    K2Config,
    evolve_k2,
    homogeneous_breakdown_time,
    homogeneous_oracle,
)
from .plotting import emit_plot, series_svg
from .shapes import curve_from_spec, parse_support, phi0_from_spec

EXIT_OK, EXIT_FAIL, EXIT_SINGULAR = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


@dataclass
class RunConfig:
    """Validated options shared by all subcommands."""

    subcommand: str
    input: str = None
    out: str = "legflow_out"
    n_samples: int = 256
    dt: float = 1e-3
    t_end: float = 1.0
    n_outputs: int = 11
    W: float = 0.0
    mode: str = "pure"
    backend: str = "rk4"
    seed: int = 0
    timestamp: bool = True
    plot: bool = True

    def __post_init__(self):
        if self.n_samples < 16 or self.n_samples % 2:
            raise UsageError(f"--n must be even and >= 16, got {self.n_samples}")
        if not self.dt > 0:
            raise UsageError(f"--dt must be positive, got {self.dt}")
        if not self.t_end >= 0:
            raise UsageError(f"--t-end must be nonnegative, got {self.t_end}")
        if self.n_outputs < 2:
            raise UsageError("--outputs must be at least 2")

    def solver(self, **kw):
        scheme = "exact-spectral" if self.backend == "spectral" else "explicit-RK4"
        return SolverConfig(
            dt=self.dt, t_end=self.t_end, n_outputs=self.n_outputs, mode=self.mode,
            scheme=scheme, **kw,
        )


def _threads():
    raw = os.environ.get("LEGFLOW_THREADS", "")
    try:
        return max(1, int(raw)) if raw else min(4, os.cpu_count() or 1)
    except ValueError:
        raise UsageError(f"LEGFLOW_THREADS must be an integer, got {raw!r}") from None


def _common(p):
    p.add_argument("--out", default="legflow_out", help="output directory (default: %(default)s)")
    p.add_argument("--n", type=int, default=256, help="samples per curve (default: %(default)s)")
    p.add_argument("--dt", type=float, default=1e-3,
                   help="maximum time step; CFL substeps below it (default: %(default)s)")
    p.add_argument("--t-end", type=float, default=1.0, help="final time (default: %(default)s)")
    p.add_argument("--outputs", type=int, default=11,
                   help="number of equally spaced output times (default: %(default)s)")
    p.add_argument("--seed", type=int, default=0, help="seed for noise:... shapes (default: %(default)s)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the creation-time comment line")
    p.add_argument("--no-plot", action="store_true", help="skip SVG output")


def _source(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--input", help="curve file (legflow-curve v1)")
    g.add_argument("--shape", default=None,
                   help="synthetic curve: circle:R, translated:CX,CY, ellipse:A,B, "
                        "support:c0=1,c2=0.1, doubleloop:EPS, helix:K[,TURNS], noise:AMP "
                        "(default: circle:1)")


def build_parser():
    parser = _Parser(prog="legflow", description="Legendrian curve flows in the Heisenberg group.")
    sub = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = sub.add_parser("evolve", help="expanding flow: planar IMCF of the projection plus lift")
    _common(p)
    _source(p)
    p.add_argument("--planar", action="store_true", help="evolve only the projection")
    p.add_argument("--mode", choices=("pure", "shape"), default="pure",
                   help="planar runs: keep material samples or redistribute by arc length")
    p.add_argument("--backend", choices=("rk4", "spectral"), default="rk4",
                   help="planar runs: explicit RK4 or exact support-function evolution")

    p = sub.add_parser("rescale", help="length-preserving flow by dilating the expanding flow")
    _common(p)
    _source(p)

    p = sub.add_parser("intrinsic", help="k^2 evolution with constant Webster curvature W")
    _common(p)
    p.add_argument("--W", type=float, default=0.0, help="Webster scalar curvature (default: %(default)s)")
    p.add_argument("--phi0", default="const:1", help="const:C, sin:A or cos:A,M (default: %(default)s)")
    p.add_argument("--period", type=float, default=2 * np.pi, help="parameter period (default: 2 pi)")

    p = sub.add_parser("geodesic", help="helix or horizontal line; variation formula checks")
    _common(p)
    p.add_argument("--k", type=float, default=1.0, help="helix curvature; 0 gives a line (default: %(default)s)")
    p.add_argument("--turns", type=int, default=1, help="helix turns (default: %(default)s)")
    p.add_argument("--z0", type=float, default=0.0, help="height at u = 0 (default: %(default)s)")
    p.add_argument("--angle", type=float, default=0.0, help="line heading in radians (default: %(default)s)")
    p.add_argument("--basepoint", type=float, nargs=3, default=(0.0, 0.0, 0.0),
                   metavar=("X", "Y", "Z"), help="line basepoint (default: origin)")
    p.add_argument("--alpha", type=float, nargs="*", default=(-1.0, 0.0, 1.0),
                   help="alpha values for the variation ODE check (default: -1 0 1)")
    p.add_argument("--s-max", type=float, default=2 * np.pi, help="variation check range (default: 2 pi)")

    p = sub.add_parser("verify", help="identity reports for a curve and a short flow")
    _common(p)
    _source(p)

    p = sub.add_parser("oracle", help="compare numerical runs with exact solutions")
    _common(p)
    p.add_argument("--kind", choices=("support", "homogeneous"), default="support",
                   help="support-function IMCF or spatially constant k^2 (default: %(default)s)")
    p.add_argument("--shape", default="support:c0=1,c2=0.1", help="convex seed (default: %(default)s)")
    p.add_argument("--phi0", type=float, default=1.0, help="homogeneous initial k^2 (default: %(default)s)")
    p.add_argument("--W", type=float, default=0.0, help="Webster curvature (default: %(default)s)")
    return parser


def _config(args):
    return RunConfig(
        subcommand=args.subcommand,
        input=getattr(args, "input", None),
        out=args.out,
        n_samples=args.n,
        dt=args.dt,
        t_end=args.t_end,
        n_outputs=args.outputs,
        W=getattr(args, "W", 0.0),
        mode=getattr(args, "mode", "pure"),
        backend=getattr(args, "backend", "rk4"),
        seed=args.seed,
        timestamp=not args.no_timestamp,
        plot=not args.no_plot,
    )


def _load_source(args, cfg):
    if cfg.input:
        return io.load_curve(cfg.input)
    return curve_from_spec(args.shape or "circle:1", cfg.n_samples, cfg.seed)


def _singular(cfg, err, out=sys.stdout):
    os.makedirs(cfg.out, exist_ok=True)
    where = f" at sample {err.index}" if err.index is not None else ""
    msg = f"singularity at t = {err.time!r}{where}: {err}"
    with open(os.path.join(cfg.out, "singularity.txt"), "w", encoding="utf-8") as fh:
        fh.write(msg + "\n")
    print(msg, file=out)
    return EXIT_SINGULAR


def _write_text(cfg, name, text):
    with open(os.path.join(cfg.out, name), "w", encoding="utf-8") as fh:
        fh.write(text if text.endswith("\n") else text + "\n")


# --------------------------------------------------------------------------
# subcommands


def cmd_evolve(args, cfg):
    curve = _load_source(args, cfg)
    if args.planar:
        planar = curve if not hasattr(curve, "z") else curve.projection()
        traj = evolve_planar(planar, cfg.solver())
    else:
        if cfg.mode != "pure" or cfg.backend != "rk4":
            raise UsageError("--mode shape and --backend spectral need --planar")
        traj = evolve_expanding(curve, cfg.solver())
    io.write_trajectory(traj, cfg.out, cfg.timestamp)
    if cfg.plot:
        emit_plot(traj, os.path.join(cfg.out, "projections.svg"))
    if traj.kind == "expanding":
        reports = conservation_suite(traj)
        reports_to_csv(reports, os.path.join(cfg.out, "reports.csv"))
        print(summarize(reports))
    L = traj.diagnostic("length")
    print(f"t_end = {traj.times[-1]:g}  length {L[0]:.10g} -> {L[-1]:.10g}")
    return EXIT_OK


def cmd_rescale(args, cfg):
    curve = _load_source(args, cfg)
    traj = rescale_trajectory(evolve_expanding(curve, cfg.solver()))
    io.write_trajectory(traj, cfg.out, cfg.timestamp)
    params, resid = fit_helix(traj.final)
    _write_text(cfg, "helix_fit.txt", f"{params.to_record()} residual={resid:.6e}")
    reports = conservation_suite(traj)
    reports_to_csv(reports, os.path.join(cfg.out, "reports.csv"))
    if cfg.plot:
        emit_plot(traj, os.path.join(cfg.out, "projections.svg"))
        emit_plot(reports, os.path.join(cfg.out, "reports.svg"))
    print(summarize(reports))
    print(f"helix fit at t = {traj.times[-1]:g}: {params.to_record()} residual/L = {resid:.3e}")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_intrinsic(args, cfg):
    phi0 = phi0_from_spec(args.phi0, cfg.n_samples, args.period)
    field0 = CurvatureField(phi0, period=args.period)
    k2cfg = K2Config(dt=cfg.dt, t_end=cfg.t_end, n_outputs=cfg.n_outputs)
    os.makedirs(cfg.out, exist_ok=True)
    try:
        traj = evolve_k2(field0, cfg.W, k2cfg)
        code = EXIT_OK
    except SingularityError as err:
        traj = err.trajectory
        code = _singular(cfg, err)
        if cfg.W > 0:
            t_star = homogeneous_breakdown_time(float(np.mean(phi0)), cfg.W)
            print(f"homogeneous breakdown estimate {t_star:.6g}")
    for i, f in enumerate(traj.fields):
        io.save_field(f, cfg.W, os.path.join(cfg.out, f"field_{i:04d}.field"), cfg.timestamp)
    phis = traj.phi_array()
    lines = ["t,min_phi,max_phi,mean_phi"]
    for t, p in zip(traj.times, phis):
        lines.append(f"{t:.17g},{p.min():.17g},{p.max():.17g},{p.mean():.17g}")
    _write_text(cfg, "diagnostics.csv", "\n".join(lines))
    mon = traj.monitor
    mon_lines = [f"c0={mon.c0!r}", f"C0={mon.C0!r}", f"violations={len(mon.violations)}"]
    mon_lines += [f"violation t={v[0]:.6g} {v[1]} value={v[2]:.10g} bound={v[3]:.10g}" for v in mon.violations]
    mon_lines += [f"fitted_limit_phi={mon.fitted_limit_phi!r}", f"fitted_limit_dphi={mon.fitted_limit_dphi!r}"]
    _write_text(cfg, "monitor.txt", "\n".join(mon_lines))
    if cfg.plot and len(traj) > 1:
        emit_plot(traj, os.path.join(cfg.out, "phi.svg"))
    fin = traj.final.phi
    print(f"t = {traj.times[-1]:g}  phi in [{fin.min():.10g}, {fin.max():.10g}]  mean {fin.mean():.10g}")
    print("\n".join(mon_lines[:3]))
    if code == EXIT_OK and mon.violations:
        code = EXIT_FAIL
    return code


def cmd_geodesic(args, cfg):
    os.makedirs(cfg.out, exist_ok=True)
    lines = []
    if args.k == 0:
        s = np.linspace(-1.0, 1.0, cfg.n_samples + 1)
        s, pts = make_horizontal_line(args.angle, args.basepoint, s)
        a, acc = open_curve_frame(s, pts)
        lines.append(f"line horizontality={np.max(np.abs(a[:, 2])):.3e} "
                     f"curvature={np.max(np.abs(acc)):.3e}")
        with open(os.path.join(cfg.out, "line.txt"), "w", encoding="utf-8") as fh:
            fh.write("s x y z\n")
            for sj, p in zip(s, pts):
                fh.write(" ".join(format(float(v), ".17g") for v in (sj, *p)) + "\n")
    else:
        helix = make_helix(args.k, args.z0, args.turns, cfg.n_samples)
        io.save_curve(helix, os.path.join(cfg.out, "helix.curve"), cfg.timestamp)
        params, resid = fit_helix(helix)
        lines.append(f"helix holonomy={helix.vertical_holonomy:.17g} "
                     f"horizontality={horizontality_residual(helix).max_abs:.3e} "
                     f"geodesic_residual={geodesic_residual(helix, args.k):.3e}")
        lines.append(f"fit {params.to_record()} residual={resid:.3e}")
    for alpha in args.alpha:
        lines.append(f"variation alpha={alpha:g} s_max={args.s_max:g} "
                     f"deviation={variation_ode_check(alpha, args.s_max):.3e}")
    _write_text(cfg, "geodesic.txt", "\n".join(lines))
    print("\n".join(lines))
    return EXIT_OK


def _static_reports(curve):
    L = curve.length
    tc = total_curvature(curve)
    turns = int(round(tc / (2 * np.pi)))
    cid = f"turning_number={turns}"
    return [
        IdentityReport("legendrian", horizontality_residual(curve).max_abs, 1e-8 * L, curve_id=cid),
        IdentityReport("vertical_identity", vertical_identity_residual(curve), 1e-8 * max(1.0, L), curve_id=cid),
        IdentityReport("minkowski", minkowski_residual(curve), 1e-6 * L, curve_id=cid),
        IdentityReport("total_curvature", tc, 1e-8, target=2 * np.pi * turns, curve_id=cid),
    ]


def cmd_verify(args, cfg):
    curve = _load_source(args, cfg)
    if not hasattr(curve, "z"):
        curve = legendrian_lift(curve)
    k = curvature_of(curve)
    jobs = [lambda: _static_reports(curve)]
    if cfg.t_end > 0 and np.all(np.abs(k) > 1e-3):
        def flow_reports():
            traj = evolve_expanding(curve, cfg.solver())
            return conservation_suite(traj) + conservation_suite(rescale_trajectory(traj))
        jobs.append(flow_reports)
    with ThreadPoolExecutor(max_workers=min(_threads(), len(jobs))) as pool:
        results = [f.result() for f in [pool.submit(j) for j in jobs]]
    reports = [r for group in results for r in group]
    os.makedirs(cfg.out, exist_ok=True)
    reports_to_csv(reports, os.path.join(cfg.out, "reports.csv"))
    if cfg.plot:
        emit_plot(reports, os.path.join(cfg.out, "reports.svg"))
    text = summarize(reports)
    _write_text(cfg, "summary.txt", text)
    print(text)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def cmd_oracle(args, cfg):
    os.makedirs(cfg.out, exist_ok=True)
    if args.kind == "homogeneous":
        field0 = CurvatureField(np.full(cfg.n_samples, args.phi0))
        try:
            traj = evolve_k2(field0, args.W, K2Config(dt=cfg.dt, t_end=cfg.t_end, n_outputs=cfg.n_outputs))
        except SingularityError as err:
            code = _singular(cfg, err)
            print(f"oracle breakdown time {homogeneous_breakdown_time(args.phi0, args.W):.6g}")
            return code
        exact = homogeneous_oracle(args.phi0, args.W, traj.times)
        err = np.max(np.abs(traj.phi_array() - exact[:, None]), axis=1)
        rows = ["t,numerical_mean,exact,sup_error"]
        rows += [f"{t:.17g},{p.mean():.17g},{e:.17g},{d:.17g}"
                 for t, p, e, d in zip(traj.times, traj.phi_array(), exact, err)]
    else:
        kind, _, spec = args.shape.partition(":")
        if kind != "support":
            raise UsageError("--kind support needs --shape support:...")
        h0 = parse_support(spec)
        h0.check_convex()
        io.save_support(h0, os.path.join(cfg.out, "seed.support"), cfg.timestamp)
        traj = evolve_planar(support_to_curve(h0, cfg.n_samples), cfg.solver())
        err = np.array([
            hausdorff_distance(s, support_to_curve(evolve_support_exact(h0, t), cfg.n_samples))
            for t, s in zip(traj.times, traj.states)
        ])
        rows = ["t,length,hausdorff_to_exact"]
        rows += [f"{t:.17g},{L:.17g},{e:.17g}" for t, L, e in zip(traj.times, traj.diagnostic("length"), err)]
    _write_text(cfg, "oracle.csv", "\n".join(rows))
    if cfg.plot:
        with open(os.path.join(cfg.out, "oracle.svg"), "w", encoding="utf-8") as fh:
            fh.write(series_svg(traj.times, {"sup error": err}, f"{args.kind} oracle error"))
    print(f"{args.kind} oracle: max error {float(np.max(err)):.3e} over t in [0, {cfg.t_end:g}]")
    return EXIT_OK


COMMANDS = {
    "evolve": cmd_evolve,
    "rescale": cmd_rescale,
    "intrinsic": cmd_intrinsic,
    "geodesic": cmd_geodesic,
    "verify": cmd_verify,
    "oracle": cmd_oracle,
}


def run(argv=None):
    """Parse ``argv`` and dispatch; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _config(args)
        return COMMANDS[cfg.subcommand](args, cfg)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except SingularityError as exc:
        return _singular(_config(args), exc, sys.stderr)
    except (LegflowError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
