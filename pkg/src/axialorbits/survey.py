"""Parameter-space survey: build the sample grid, integrate one stellar
period per point, and classify each orbit as planar, nonplanar or unbound.

Classification of a trajectory, following the three-step procedure:

1. If the star-centric energy relative to the initially closest star is
   positive after one stellar orbit (or at the last sample of an aborted
   ejection), the orbit is unbound.
2. M(t) is monitored over the period; whether it changed sign and how far
   it collapsed are recorded as evidence (for every orbit surveyed it either
   changes sign or falls below one percent of its initial value; the
   monitoring never changes the verdict).
3. Otherwise the displacement from the closest star is tracked in the
   inertial frame against the planet's initial orbital plane (unit normal =
   star-centric r x v at t = 0): staying within 15 degrees of that plane
   for the whole period makes the orbit planar, anything else nonplanar.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import Star, SystemConfig
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    initial_conditions,
    integrate,
    jacobi_drift,
)
from .equilibrium import (
    BoundaryKind,
    PrereqFlags,
    boundary_distance,
    prerequisites,
)
from .errors import EmptyTrajectoryError

PLANAR_MAX_DEVIATION_DEG = 15.0
M_COLLAPSE_FRACTION = 0.01


class Verdict:
    PLANAR = "Planar"
    NONPLANAR = "Nonplanar"
    UNBOUND = "Unbound"


@dataclass(frozen=True)
class GridSpec:
    """One sub-grid: distances from ``star`` as fractions of the per-b
    stability-boundary distance."""

    star: Star
    b_values: tuple
    w_fractions: tuple

    def __post_init__(self):
        object.__setattr__(self, "b_values", tuple(float(b) for b in self.b_values))
        object.__setattr__(self, "w_fractions", tuple(float(q) for q in self.w_fractions))
        if any(not (0.0 < q < 1.0) for q in self.w_fractions):
            raise ValueError("fractions must lie in (0, 1)")
        if any(b < 1.0 for b in self.b_values):
            raise ValueError("mass ratios must satisfy b >= 1")

    @property
    def count(self) -> int:
        return len(self.b_values) * len(self.w_fractions)


def default_grid_specs() -> tuple[GridSpec, GridSpec]:
    """The default 540-point survey: 18 mass ratios geometrically spaced in
    [1, 100]; 20 fractions in [0.05, 0.98] of the stability boundary near
    the lighter star, 10 fractions in [0.05, 0.50] near the heavier star
    (the inner half, so every sample is unambiguously close to its star)."""
    bs = tuple(np.geomspace(1.0, 100.0, 18))
    lighter = GridSpec(Star.LIGHTER, bs, tuple(np.linspace(0.05, 0.98, 20)))
    heavier = GridSpec(Star.HEAVIER, bs, tuple(np.linspace(0.05, 0.50, 10)))
    return lighter, heavier


@dataclass(frozen=True)
class GridPoint:
    star: Star
    b: float
    w: float          # axial coordinate measured from the lighter star
    fraction: float
    boundary: float   # stability-boundary distance from the chosen star


def build_grid(spec: GridSpec) -> list[GridPoint]:
    """Expand a GridSpec into concrete (w, b) points.

    Every generated point lies strictly inside the stability boundary, so
    existence and stability hold by construction. Raises NoCrossingError if
    a stability boundary cannot be located for some b.
    """
    points = []
    for b in spec.b_values:
        d_star = boundary_distance(BoundaryKind.STABILITY, spec.star, b)
        for q in spec.w_fractions:
            d = q * d_star
            w = d if spec.star is Star.LIGHTER else 1.0 - d
            points.append(GridPoint(star=spec.star, b=b, w=w, fraction=q, boundary=d_star))
    return points


@dataclass(frozen=True)
class ClassificationResult:
    verdict: str
    max_plane_deviation_deg: float
    m_sign_changed: bool
    min_abs_m_ratio: float
    prereq: PrereqFlags | None
    aborted: bool


def classify(traj: Trajectory, cfg: SystemConfig,
             prereq: PrereqFlags | None = None) -> ClassificationResult:
    """Apply the three-step classification to an integrated trajectory."""
    if len(traj) < 2:
        raise EmptyTrajectoryError("trajectory has fewer than 2 samples")

    m0 = traj.m[0]
    if m0 != 0.0:
        m_sign_changed = bool(np.any(traj.m * m0 < 0.0))
        min_ratio = float(np.min(np.abs(traj.m / m0)))
    else:
        m_sign_changed = bool(np.any(traj.m != 0.0))
        min_ratio = math.nan

    # displacement from the initially closest star, inertial frame
    disp = traj.inertial_positions(cfg) - _star_positions_inertial(cfg, traj)
    # initial orbital-plane normal from the star-centric angular momentum
    vel_in = traj.inertial_velocities(cfg) - _star_velocities_inertial(cfg, traj)
    n0 = np.cross(disp[0], vel_in[0])
    norm = np.linalg.norm(n0)
    if norm > 1e-12:
        n0 /= norm
    else:
        # radial or degenerate start: fall back to the axis direction
        n0 = np.array([1.0, 0.0, 0.0])
    dist = np.linalg.norm(disp, axis=1)
    sin_dev = np.clip((disp @ n0) / dist, -1.0, 1.0)
    max_dev = float(np.degrees(np.max(np.abs(np.arcsin(sin_dev)))))

    if traj.e_star[-1] > 0.0:
        verdict = Verdict.UNBOUND
    elif max_dev <= PLANAR_MAX_DEVIATION_DEG:
        verdict = Verdict.PLANAR
    else:
        verdict = Verdict.NONPLANAR
    return ClassificationResult(verdict=verdict, max_plane_deviation_deg=max_dev,
                                m_sign_changed=m_sign_changed, min_abs_m_ratio=min_ratio,
                                prereq=prereq, aborted=traj.aborted)


def _star_positions_inertial(cfg, traj):
    xs = cfg.x_light if traj.bound_star is Star.LIGHTER else cfg.x_heavy
    th = cfg.omega_s * traj.t
    return np.column_stack([xs * np.cos(th), xs * np.sin(th), np.zeros(len(traj))])


def _star_velocities_inertial(cfg, traj):
    xs = cfg.x_light if traj.bound_star is Star.LIGHTER else cfg.x_heavy
    th = cfg.omega_s * traj.t
    om = cfg.omega_s
    return np.column_stack([-xs * om * np.sin(th), xs * om * np.cos(th), np.zeros(len(traj))])


@dataclass(frozen=True)
class SurveyRow:
    """One grid point's full record: equilibrium data, prerequisite flags,
    verdict with evidence, and integration-quality diagnostics."""

    star: Star
    b: float
    w: float
    fraction: float
    v0: float
    f_p: float
    freq_ratio: float
    delta_w_amp: float
    delta_v_amp: float
    prereq: PrereqFlags
    verdict: str
    max_plane_dev_deg: float
    m_sign_changed: bool
    min_abs_m_ratio: float
    aborted: bool
    jacobi_drift: float
    torque_residual: float

    @property
    def bound(self) -> bool:
        return self.verdict in (Verdict.PLANAR, Verdict.NONPLANAR)


def _survey_point(point: GridPoint, icfg: IntegratorConfig,
                  ic_convention: str) -> SurveyRow:
    cfg = SystemConfig.from_mass_ratio(point.b)
    orbit = prerequisites(point.w, point.b)
    state0 = initial_conditions(orbit, cfg, convention=ic_convention)
    traj = integrate(state0, cfg, icfg, cfg.stellar_period)
    result = classify(traj, cfg, orbit.prereq)
    return SurveyRow(
        star=point.star, b=point.b, w=point.w, fraction=point.fraction,
        v0=orbit.v0, f_p=orbit.f_p, freq_ratio=orbit.frequency_ratio,
        delta_w_amp=orbit.delta_w_amp, delta_v_amp=orbit.delta_v_amp,
        prereq=orbit.prereq, verdict=result.verdict,
        max_plane_dev_deg=result.max_plane_deviation_deg,
        m_sign_changed=result.m_sign_changed,
        min_abs_m_ratio=result.min_abs_m_ratio,
        aborted=result.aborted,
        jacobi_drift=jacobi_drift(traj),
        torque_residual=traj.torque_residual)


def _survey_task(args):
    point = args[0]
    try:
        return _survey_point(*args)
    except Exception:  # recorded in-row, sweep continues
        return _failure_row(point)


def run_survey(specs: GridSpec | Sequence[GridSpec],
               icfg: IntegratorConfig | None = None, *,
               points: Sequence[GridPoint] | None = None,
               ic_convention: str = "rotating",
               workers: int | None = None,
               log=None) -> list[SurveyRow]:
    """Integrate and classify every grid point; one row per point.

    Per-point failures never abort the sweep: a failed point is recorded
    with ``aborted=True``, verdict "Error" and NaN metrics (the default grid
    never produces one; custom grid points without an equilibrium do). Rows
    come back sorted by (b, w) regardless of execution order; ``workers`` > 1
    runs points in parallel processes.
    """
    if icfg is None:
        icfg = IntegratorConfig()
    if points is None:
        if isinstance(specs, GridSpec):
            specs = [specs]
        points = []
        for spec in specs:
            points.extend(build_grid(spec))

    tasks = [(p, icfg, ic_convention) for p in points]
    rows = []
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for row in pool.map(_survey_task, tasks, chunksize=8):
                rows.append(row)
                if log:
                    log(row)
    else:
        for task in tasks:
            row = _survey_task(task)
            rows.append(row)
            if log:
                log(row)
    rows.sort(key=lambda r: (r.b, r.w))
    return rows


def _failure_row(point: GridPoint) -> SurveyRow:
    flags = PrereqFlags(False, False, False, False)
    nan = math.nan
    return SurveyRow(star=point.star, b=point.b, w=point.w, fraction=point.fraction,
                     v0=nan, f_p=nan, freq_ratio=nan, delta_w_amp=nan, delta_v_amp=nan,
                     prereq=flags, verdict="Error",
                     max_plane_dev_deg=nan, m_sign_changed=False, min_abs_m_ratio=nan,
                     aborted=True, jacobi_drift=nan, torque_residual=nan)


def summarize(rows: Sequence[SurveyRow]) -> dict:
    """Aggregate counts, the planar fraction of all-prerequisite points and
    the per-figure scatter lists. JSON-ready."""
    if not rows:
        raise ValueError("no rows to summarize")
    verdicts = {}
    combos = {}
    for r in rows:
        verdicts[r.verdict] = verdicts.get(r.verdict, 0) + 1
        key = "".join("T" if f else "F" for f in r.prereq.as_tuple())
        combos[key] = combos.get(key, 0) + 1
    all_prereq = [r for r in rows if r.prereq.all_met]
    if all_prereq:
        planar_fraction = sum(r.verdict == Verdict.PLANAR for r in all_prereq) / len(all_prereq)
    else:
        planar_fraction = None
    bound = [r for r in rows if r.bound]
    m_collapsed = sum(r.m_sign_changed or r.min_abs_m_ratio < M_COLLAPSE_FRACTION
                      for r in bound)
    figures = {}
    for star in (Star.LIGHTER, Star.HEAVIER):
        figures[star.value] = [
            {"distance": r.w if star is Star.LIGHTER else 1.0 - r.w,
             "b": r.b, "verdict": r.verdict, "all_prereq": r.prereq.all_met}
            for r in rows if r.star is star]
    return {
        "total": len(rows),
        "verdict_counts": verdicts,
        "prereq_combination_counts": combos,
        "all_prereq_count": len(all_prereq),
        "planar_fraction_all_prereq": planar_fraction,
        "bound_count": len(bound),
        "m_collapsed_bound_count": m_collapsed,
        "figures": figures,
    }


RESULTS_CSV_HEADER = ["star", "b", "w", "v0", "f_p", "freq_ratio",
                      "delta_w_amp", "delta_v_amp",
                      "exists", "stable", "fast", "small_pert",
                      "verdict", "max_plane_dev_deg", "m_sign_changed",
                      "min_abs_m_ratio", "aborted"]


def _fmt_bool(x: bool) -> str:
    return "true" if x else "false"


def _fmt(x) -> str:
    return repr(float(x))  # shortest round-trip decimal


def write_results_csv(rows: Iterable[SurveyRow], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULTS_CSV_HEADER)
        for r in rows:
            writer.writerow([
                r.star.value, _fmt(r.b), _fmt(r.w), _fmt(r.v0), _fmt(r.f_p),
                _fmt(r.freq_ratio), _fmt(r.delta_w_amp), _fmt(r.delta_v_amp),
                _fmt_bool(r.prereq.exists), _fmt_bool(r.prereq.stable),
                _fmt_bool(r.prereq.fast), _fmt_bool(r.prereq.small_perturbation),
                r.verdict, _fmt(r.max_plane_dev_deg), _fmt_bool(r.m_sign_changed),
                _fmt(r.min_abs_m_ratio), _fmt_bool(r.aborted)])


def write_summary_json(summary: dict, path) -> None:
    with open(path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_scatter_csv(rows: Iterable[SurveyRow], star: Star, path) -> None:
    """Per-figure scatter data: distance from the chosen star, b, verdict."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["distance", "b", "verdict", "all_prereq"])
        for r in rows:
            if r.star is not star:
                continue
            d = r.w if star is Star.LIGHTER else 1.0 - r.w
            writer.writerow([_fmt(d), _fmt(r.b), r.verdict, _fmt_bool(r.prereq.all_met)])
