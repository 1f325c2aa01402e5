"""Command-line surface: single-point analysis, boundary curves, one-orbit
integration with exports, tilted-circle model checks and the full survey.

Exit codes: 0 success, 2 usage error, 3 domain error, 4 numerical failure.
Domain and numerical errors print a machine-readable JSON object
{"error": <type>, "message": <text>} to stdout before exiting.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .core import Frame, Star, SystemConfig
from .dynamics import (
    IntegratorConfig,
    initial_conditions,
    integrate,
    jacobi_drift,
    write_trajectory_csv,
)
from .equilibrium import (
    BoundaryKind,
    axial_residual,
    prerequisites,
    trace_boundary,
    write_boundary_csv,
)
from .errors import (
    DegenerateEquilibriumError,
    DegenerateOscillatorError,
    EmptyTrajectoryError,
    FrameMismatchError,
    NoCrossingError,
    SingularityError,
)
from .survey import (
    GridPoint,
    classify,
    default_grid_specs,
    run_survey,
    summarize,
    write_results_csv,
    write_scatter_csv,
    write_summary_json,
)
from .torque import (
    AnsatzParams,
    analytic_solution,
    ansatz_M,
    ansatz_state,
    ansatz_torques,
    axial_angular_momentum,
    balance_residual,
    centrifugal_torque,
    coriolis_torque,
    solution_axial_momentum,
)
from .svgplot import write_svg

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NUMERICAL = 4

_DOMAIN_ERRORS = (ValueError, DegenerateEquilibriumError, DegenerateOscillatorError,
                  FrameMismatchError, SingularityError, OSError, KeyError)
_NUMERICAL_ERRORS = (NoCrossingError, EmptyTrajectoryError, ArithmeticError)


class NoEquilibrium(Exception):
    """CLI-level marker for a missing equilibrium at the requested point."""


def _error_json(exc) -> str:
    return json.dumps({"error": type(exc).__name__, "message": str(exc)})


def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out-dir", default=".", help="directory for output files")
    p.add_argument("--tol", type=float, default=1e-12,
                   help="relative integration tolerance (absolute = tol/10)")
    p.add_argument("--dense-samples", type=int, default=10_000,
                   help="number of dense output samples per run")
    p.add_argument("--ic-convention", choices=["rotating", "inertial"], default="rotating",
                   help="how the motionless-star velocity seeds the rotating frame")
    p.add_argument("--seed", type=int, default=0, help="seed for sampled checks")
    return p


def _integrator_config(args) -> IntegratorConfig:
    return IntegratorConfig(rel_tol=args.tol, abs_tol=args.tol / 10.0,
                            dense_samples=args.dense_samples)


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _orbit_report(orbit) -> dict:
    res = axial_residual(orbit.w, orbit.b, orbit.v0) if orbit.prereq.exists else None
    return {
        "w": orbit.w, "b": orbit.b, "v0": orbit.v0, "f_p": orbit.f_p,
        "M0": orbit.M0, "freq_ratio": orbit.frequency_ratio,
        "omega_plus": orbit.omega_plus, "omega_minus": orbit.omega_minus,
        "alpha_axis": orbit.alpha_axis,
        "delta_w_amp": orbit.delta_w_amp, "delta_v_amp": orbit.delta_v_amp,
        "residual": res,
        "prerequisites": {
            "exists": orbit.prereq.exists, "stable": orbit.prereq.stable,
            "fast": orbit.prereq.fast,
            "small_perturbation": orbit.prereq.small_perturbation,
        },
    }


def cmd_equilibrium(args) -> int:
    orbit = prerequisites(args.w, args.b)
    if not orbit.prereq.exists:
        print(_error_json(NoEquilibrium(
            f"no circular orbit around the axis exists at (w={args.w}, b={args.b})")))
        return EXIT_DOMAIN
    report = _orbit_report(orbit)
    report = {k: (None if isinstance(v, float) and math.isnan(v) else v)
              for k, v in report.items()}
    print(json.dumps(report, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_curves(args) -> int:
    if args.n < 2:
        raise UsageError("--n must be at least 2")
    if args.b_min < 1.0 or args.b_max < args.b_min:
        raise UsageError("need 1 <= b-min <= b-max")
    if args.spacing == "geom":
        bs = np.geomspace(args.b_min, args.b_max, args.n)
    else:
        bs = np.linspace(args.b_min, args.b_max, args.n)
    kind = BoundaryKind(args.kind)
    star = Star(args.star)
    points = trace_boundary(kind, star, bs)
    out = _out_dir(args) / f"curve_{kind.value}_{star.value}.csv"
    write_boundary_csv(points, out)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_integrate(args) -> int:
    if args.periods <= 0:
        raise UsageError("--periods must be positive")
    cfg = SystemConfig.from_mass_ratio(args.b)
    orbit = prerequisites(args.w, args.b)
    if not orbit.prereq.exists:
        print(_error_json(NoEquilibrium(
            f"no circular orbit around the axis exists at (w={args.w}, b={args.b})")))
        return EXIT_DOMAIN
    icfg = _integrator_config(args)
    state0 = initial_conditions(orbit, cfg, phase=args.phase,
                                convention=args.ic_convention)
    traj = integrate(state0, cfg, icfg, args.periods * cfg.stellar_period)
    result = classify(traj, cfg, orbit.prereq)

    out = _out_dir(args)
    frames = [Frame.ROTATING, Frame.INERTIAL] if args.frames == "both" else [Frame(args.frames)]
    for frame in frames:
        write_trajectory_csv(traj, cfg, out / f"trajectory_{frame.value}.csv", frame=frame)

    tau = cfg.stellar_period
    with open(out / "m_ratio.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t_over_period", "m_over_m0"])
        m0 = traj.m[0]
        for i in range(len(traj)):
            writer.writerow([repr(float(traj.t[i] / tau)), repr(float(traj.m[i] / m0))])

    payload = {
        "verdict": result.verdict,
        "max_plane_deviation_deg": result.max_plane_deviation_deg,
        "m_sign_changed": result.m_sign_changed,
        "min_abs_m_ratio": result.min_abs_m_ratio,
        "aborted": result.aborted,
        "bound_star": traj.bound_star.value,
        "jacobi_drift": jacobi_drift(traj),
        "torque_balance_residual": traj.torque_residual,
        "prerequisites": {
            "exists": orbit.prereq.exists, "stable": orbit.prereq.stable,
            "fast": orbit.prereq.fast,
            "small_perturbation": orbit.prereq.small_perturbation,
        },
    }
    with open(out / "classification.json", "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(json.dumps(payload, indent=2, sort_keys=True))

    if args.svg:
        _write_integrate_svgs(out, traj, cfg)
    return EXIT_OK


def _write_integrate_svgs(out: Path, traj, cfg) -> None:
    star = traj.bound_star
    other = Star.HEAVIER if star is Star.LIGHTER else Star.LIGHTER
    th = cfg.omega_s * traj.t
    pos_in = traj.inertial_positions(cfg)
    xs = cfg.x_light if star is Star.LIGHTER else cfg.x_heavy
    star_in = np.column_stack([xs * np.cos(th), xs * np.sin(th), np.zeros(len(traj))])
    disp = pos_in - star_in
    xo = cfg.x_light if other is Star.LIGHTER else cfg.x_heavy
    other_in = np.column_stack([xo * np.cos(th), xo * np.sin(th), np.zeros(len(traj))])
    other_disp = other_in - star_in
    write_svg(out / "trajectory.svg",
              [(disp[:, 1], disp[:, 2], "planet", 1.0),
               (other_disp[:, 1], other_disp[:, 2], "companion", 2.5)],
              title="star-centric trajectory (inertial, y-z projection)",
              xlabel="y", ylabel="z", equal_axes=True)
    write_svg(out / "m_ratio.svg",
              [(traj.t / cfg.stellar_period, traj.m / traj.m[0], "", 1.0)],
              title="axial angular momentum", xlabel="t / period", ylabel="M/M0")


def _load_grid_file(path) -> list[GridPoint]:
    with open(path) as fh:
        payload = json.load(fh)
    if not isinstance(payload, dict) or "points" not in payload:
        raise ValueError('grid file must be a JSON object with a "points" list')
    points = []
    for entry in payload["points"]:
        w, b = float(entry["w"]), float(entry["b"])
        star = Star(entry.get("star", "lighter" if w < 0.5 else "heavier"))
        d = w if star is Star.LIGHTER else 1.0 - w
        points.append(GridPoint(star=star, b=b, w=w,
                                fraction=float(entry.get("fraction", math.nan)),
                                boundary=float(entry.get("boundary", math.nan))))
    return points


def cmd_survey(args) -> int:
    icfg = _integrator_config(args)
    out = _out_dir(args)

    def log(row):
        print(f"b={row.b:.6g} w={row.w:.6g} -> {row.verdict}", file=sys.stderr)

    if args.grid:
        points = _load_grid_file(args.grid)
        rows = run_survey((), icfg, points=points, ic_convention=args.ic_convention,
                          workers=args.workers, log=log)
    else:
        rows = run_survey(default_grid_specs(), icfg, ic_convention=args.ic_convention,
                          workers=args.workers, log=log)
    if all(r.verdict == "Error" for r in rows):
        print(_error_json(RuntimeError("every survey point failed")))
        return EXIT_NUMERICAL
    write_results_csv(rows, out / "results.csv")
    summary = summarize(rows)
    write_summary_json(summary, out / "summary.json")
    write_scatter_csv(rows, Star.LIGHTER, out / "scatter_lighter.csv")
    write_scatter_csv(rows, Star.HEAVIER, out / "scatter_heavier.csv")
    print(json.dumps({k: summary[k] for k in
                      ("total", "verdict_counts", "all_prereq_count",
                       "planar_fraction_all_prereq")}, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_ansatz(args) -> int:
    params = AnsatzParams(rho=args.rho, f=args.f, omega=args.omega,
                          alpha0=args.alpha0, x0=args.x0)
    law = analytic_solution(args.alpha0, args.omega, args.x0)
    period = 2.0 * math.pi / args.omega if args.omega > 0 else 2.0 * math.pi / args.f
    ts = np.linspace(0.0, args.periods * period, args.samples)
    out = _out_dir(args) / "ansatz.csv"
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["t", "M_general", "M_solution", "T1", "T2", "residual"])
        for t in ts:
            t1, t2 = ansatz_torques(params, law, t)
            writer.writerow([repr(float(t)),
                             repr(ansatz_M(params, law, t)),
                             repr(solution_axial_momentum(params, t)),
                             repr(t1), repr(t2),
                             repr(balance_residual(params, law, t))])
    print(f"wrote {out}")
    if args.check:
        rng = np.random.default_rng(args.seed)
        worst = 0.0
        for _ in range(args.check):
            p = AnsatzParams(rho=rng.uniform(0.1, 1.5), f=rng.uniform(0.5, 10.0),
                             omega=rng.uniform(0.0, 3.0),
                             alpha0=rng.uniform(-math.pi, math.pi),
                             x0=rng.uniform(-1.0, 1.0))
            lw = analytic_solution(p.alpha0, p.omega, p.x0)
            t = rng.uniform(0.0, 10.0)
            s = ansatz_state(p, lw, t)
            t1c, t2c = ansatz_torques(p, lw, t)
            worst = max(worst,
                        abs(ansatz_M(p, lw, t) - axial_angular_momentum(s)),
                        abs(t1c - coriolis_torque(s, p.omega)),
                        abs(t2c - centrifugal_torque(s, p.omega)),
                        abs(balance_residual(p, lw, t)))
        print(json.dumps({"identity_draws": args.check, "max_error": worst}), file=sys.stderr)
    return EXIT_OK


def cmd_torque_check(args) -> int:
    if args.omega is None and args.b is None:
        raise UsageError("torque-check needs --omega or --b")
    omega = args.omega if args.omega is not None else math.sqrt(1.0 + args.b)
    with open(args.trajectory) as fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if len(rows) < 5:
        print(_error_json(EmptyTrajectoryError("need at least 5 trajectory samples")))
        return EXIT_NUMERICAL
    t = np.array([float(r["t"]) for r in rows])
    y = np.array([float(r["y"]) for r in rows])
    z = np.array([float(r["z"]) for r in rows])
    vx = np.array([float(r["vx"]) for r in rows])
    vy = np.array([float(r["vy"]) for r in rows])
    vz = np.array([float(r["vz"]) for r in rows])
    h = t[1] - t[0]
    if not np.allclose(np.diff(t), h, rtol=1e-6):
        print(_error_json(ValueError("trajectory samples must be uniformly spaced")))
        return EXIT_NUMERICAL
    m = y * vz - z * vy
    dm = (m[:-4] - 8.0 * m[1:-3] + 8.0 * m[3:-1] - m[4:]) / (12.0 * h)
    torque = 2.0 * omega * z * vx - omega * omega * y * z
    resid = np.abs(dm - torque[2:-2])
    print(json.dumps({"samples": len(rows), "omega": omega,
                      "max_residual": float(resid.max()),
                      "mean_residual": float(resid.mean())}, indent=2, sort_keys=True))
    return EXIT_OK


class UsageError(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="axialorbits",
        description="Orbits around the interstellar axis of a circular binary: "
                    "equilibrium analysis, torque balance, integration and survey.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("equilibrium", parents=[common],
                       help="solve one (w, b) point and report the prerequisite flags")
    p.add_argument("--w", type=float, required=True,
                   help="axial distance from the lighter star, in (0, 1)")
    p.add_argument("--b", type=float, required=True, help="mass ratio, >= 1")
    p.set_defaults(func=cmd_equilibrium)

    p = sub.add_parser("curves", parents=[common],
                       help="trace a parameter-space boundary curve to CSV")
    p.add_argument("--kind", choices=[k.value for k in BoundaryKind], required=True)
    p.add_argument("--star", choices=[s.value for s in Star], default="lighter")
    p.add_argument("--b-min", type=float, default=1.0)
    p.add_argument("--b-max", type=float, default=100.0)
    p.add_argument("--n", type=int, default=18, help="number of b samples (>= 2)")
    p.add_argument("--spacing", choices=["geom", "linear"], default="geom")
    p.set_defaults(func=cmd_curves)

    p = sub.add_parser("integrate", parents=[common],
                       help="integrate one orbit over full stellar periods and classify it")
    p.add_argument("--w", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--periods", type=float, default=1.0, help="stellar periods to cover")
    p.add_argument("--phase", type=float, default=0.0, help="initial phase on the circle")
    p.add_argument("--frames", choices=["rotating", "inertial", "both"], default="rotating",
                   help="frame(s) for the trajectory CSV")
    p.add_argument("--svg", action="store_true", help="also write SVG plots")
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("survey", parents=[common],
                       help="run the full grid survey and write results + summary")
    p.add_argument("--grid", help="JSON file with custom points "
                                  '[{"w": ..., "b": ...}, ...] instead of the default grid')
    p.add_argument("--workers", type=int, default=None,
                   help="parallel worker processes (default: serial)")
    p.set_defaults(func=cmd_survey)

    p = sub.add_parser("ansatz", parents=[common],
                       help="emit the tilted-circle model series and torque-balance residual")
    p.add_argument("--rho", type=float, required=True, help="orbit radius")
    p.add_argument("--f", type=float, required=True, help="orbit frequency")
    p.add_argument("--omega", type=float, required=True, help="stellar frequency")
    p.add_argument("--alpha0", type=float, default=0.0, help="initial tilt angle")
    p.add_argument("--x0", type=float, default=0.0, help="orbit-center x position")
    p.add_argument("--samples", type=int, default=2001)
    p.add_argument("--periods", type=float, default=1.0, help="stellar periods to cover")
    p.add_argument("--check", type=int, default=0,
                   help="also run N random closed-form identity draws (uses --seed)")
    p.set_defaults(func=cmd_ansatz)

    p = sub.add_parser("torque-check", parents=[common],
                       help="torque-balance residual scan over a trajectory CSV")
    p.add_argument("--trajectory", required=True, help="trajectory CSV (rotating frame)")
    p.add_argument("--omega", type=float, default=None, help="stellar angular frequency")
    p.add_argument("--b", type=float, default=None, help="mass ratio (sets omega = sqrt(1+b))")
    p.set_defaults(func=cmd_torque_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.error(str(exc))  # exits 2
    except _NUMERICAL_ERRORS as exc:
        print(_error_json(exc))
        return EXIT_NUMERICAL
    except _DOMAIN_ERRORS as exc:
        print(_error_json(exc))
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
