"""Motionless-star analysis of circular orbits around the interstellar axis.

With the stars pinned, a planet can move on a circle of radius ``v`` around
the x axis, in the plane at scaled distance ``w`` from the lighter star
(measured toward the heavier one). The circle is an orbit when the axial
gravitational pulls of the two stars cancel, and it is a stable one when the
effective potential

    U(w, v) = -1/r1 - b/r2 + M^2 / (2 v^2),
    r1 = sqrt(w^2 + v^2),  r2 = sqrt((1-w)^2 + v^2)

has a positive-definite Hessian there, with the axial angular momentum M
frozen at its circular-orbit value M0 = f_p v0^2. This module solves for the
orbit, tests its stability, builds the 2D-oscillator eigenstructure around
it, evaluates the driven-perturbation amplitudes, checks the four
applicability prerequisites, and traces the parameter-space boundary curves.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.optimize import brentq

from .core import Star, kepler_frequency
from .errors import (
    DegenerateEquilibriumError,
    DegenerateOscillatorError,
    NoCrossingError,
    SingularityError,
)

# Bracket for the equilibrium-radius search: orbits of interest are far
# inside [1e-6, 10] scaled lengths.
V_BRACKET = (1e-6, 10.0)
V_SCAN_POINTS = 10_000

# Prerequisite thresholds.
FREQUENCY_RATIO_MIN = 10.0     # f_p >= 10 * omega_s
PERTURBATION_MAX_FRACTION = 0.5  # |delta_v| <= v0 / 2
DEGENERATE_EIGENVALUE_TOL = 1e-12


def _check_domain(w: float, b: float) -> None:
    if not 0.0 < w < 1.0:
        raise ValueError(f"w must lie strictly between the stars (0 < w < 1), got {w}")
    if b < 1.0:
        raise ValueError(f"mass ratio must satisfy b >= 1, got {b}")


def axial_residual(w: float, b: float, v):
    """Net axial gravitational acceleration toward the lighter star.

    g(v) = w / (w^2 + v^2)^(3/2) - b (1 - w) / ((1 - w)^2 + v^2)^(3/2)

    Zero at the equilibrium radius. Accepts a scalar or array v > 0.
    """
    _check_domain(w, b)
    v = np.asarray(v, dtype=float)
    if np.any(v <= 0.0):
        raise ValueError("v must be positive")
    r1sq = w * w + v * v
    r2sq = (1.0 - w) ** 2 + v * v
    out = w / r1sq**1.5 - b * (1.0 - w) / r2sq**1.5
    return float(out) if out.ndim == 0 else out


def solve_equilibrium_radius(w: float, b: float) -> float | None:
    """Radius of the circular orbit around the axis, or None if none exists.

    Scans the bracket for a sign change of the axial residual, then refines
    with Brent's method to |residual| well below 1e-12. Raises
    DegenerateEquilibriumError at (w, b) = (0.5, 1), where the residual
    vanishes identically and every radius is an orbit.
    """
    _check_domain(w, b)
    if w == 0.5 and b == 1.0:
        raise DegenerateEquilibriumError("w = 0.5 with b = 1: every radius is an equilibrium")
    vs = np.linspace(V_BRACKET[0], V_BRACKET[1], V_SCAN_POINTS)
    gs = axial_residual(w, b, vs)
    zero_hits = np.nonzero(gs == 0.0)[0]
    if zero_hits.size:
        return float(vs[zero_hits[0]])
    flips = np.nonzero(np.sign(gs[:-1]) * np.sign(gs[1:]) < 0)[0]
    if flips.size == 0:
        return None
    i = flips[0]
    return float(brentq(lambda v: axial_residual(w, b, v), vs[i], vs[i + 1], xtol=1e-15, rtol=8.9e-16))


def orbit_frequency(w: float, b: float, v0: float) -> float:
    """Angular frequency of the circular orbit, from radial force balance.

    f_p^2 = 1/r1^3 + b/r2^3 evaluated at the orbit point (w, v0).
    """
    _check_domain(w, b)
    if v0 <= 0.0:
        raise ValueError(f"orbit radius must be positive, got {v0}")
    r1 = math.hypot(w, v0)
    r2 = math.hypot(1.0 - w, v0)
    return math.sqrt(1.0 / r1**3 + b / r2**3)


def effective_potential(w_pt: float, v_pt: float, b: float, M: float) -> float:
    """Effective potential at a point of the (axial, radial) half plane."""
    if v_pt == 0.0:
        raise SingularityError("effective potential is singular on the axis (v = 0)")
    r1 = math.hypot(w_pt, v_pt)
    r2 = math.hypot(1.0 - w_pt, v_pt)
    if r1 == 0.0 or r2 == 0.0:
        raise SingularityError("effective potential is singular at a star")
    return -1.0 / r1 - b / r2 + M * M / (2.0 * v_pt * v_pt)


def potential_gradient(w_pt: float, v_pt: float, b: float, M: float) -> tuple[float, float]:
    """Closed-form (dU/dw, dU/dv) of the effective potential."""
    r1 = math.hypot(w_pt, v_pt)
    r2 = math.hypot(1.0 - w_pt, v_pt)
    gw = w_pt / r1**3 - b * (1.0 - w_pt) / r2**3
    gv = v_pt / r1**3 + b * v_pt / r2**3 - M * M / v_pt**3
    return gw, gv


def potential_hessian(w_pt: float, v_pt: float, b: float, M: float) -> np.ndarray:
    """Closed-form 2x2 Hessian of the effective potential."""
    r1 = math.hypot(w_pt, v_pt)
    r2 = math.hypot(1.0 - w_pt, v_pt)
    r1_3, r1_5 = r1**3, r1**5
    r2_3, r2_5 = r2**3, r2**5
    h_ww = 1.0 / r1_3 - 3.0 * w_pt**2 / r1_5 + b / r2_3 - 3.0 * b * (1.0 - w_pt) ** 2 / r2_5
    h_wv = 3.0 * v_pt * (-w_pt / r1_5 + b * (1.0 - w_pt) / r2_5)
    h_vv = (1.0 / r1_3 + b / r2_3
            - 3.0 * v_pt**2 * (1.0 / r1_5 + b / r2_5)
            + 3.0 * M * M / v_pt**4)
    return np.array([[h_ww, h_wv], [h_wv, h_vv]])


@dataclass(frozen=True)
class OscillatorModes:
    """Eigenstructure of the potential well around a solved equilibrium.

    ``alpha_axis`` is the angle (in [0, pi/2)) between the coordinate axes
    and the principal axes; ``omega_plus/minus`` are sqrt of the Hessian
    eigenvalues (NaN when the corresponding eigenvalue is negative).
    """

    lambda_plus: float
    lambda_minus: float
    omega_plus: float
    omega_minus: float
    alpha_axis: float
    stable: bool


def _eigensystem(hess: np.ndarray) -> OscillatorModes:
    a, c, d = float(hess[0, 0]), float(hess[0, 1]), float(hess[1, 1])
    mean = 0.5 * (a + d)
    disc = math.hypot(0.5 * (a - d), c)
    lam_p, lam_m = mean + disc, mean - disc
    alpha = 0.5 * math.atan2(2.0 * c, a - d)
    alpha %= math.pi / 2.0
    stable = lam_p > 0.0 and lam_m > 0.0
    return OscillatorModes(
        lambda_plus=lam_p,
        lambda_minus=lam_m,
        omega_plus=math.sqrt(lam_p) if lam_p > 0 else math.nan,
        omega_minus=math.sqrt(lam_m) if lam_m > 0 else math.nan,
        alpha_axis=alpha,
        stable=stable,
    )


def oscillator_eigensystem(w: float, b: float, v0: float | None = None) -> OscillatorModes:
    """Oscillator modes of the effective-potential well at the equilibrium.

    Solves for the equilibrium radius when ``v0`` is not supplied. The
    angular momentum is frozen at M0 = f_p v0^2. An unstable equilibrium is
    not an error: the result carries ``stable = False``.
    """
    if v0 is None:
        v0 = solve_equilibrium_radius(w, b)
        if v0 is None:
            raise ValueError(f"no equilibrium orbit exists at (w={w}, b={b})")
    m0 = orbit_frequency(w, b, v0) * v0 * v0
    return _eigensystem(potential_hessian(w, v0, b, m0))


def _amplitudes(omega_s, f_p, v0, alpha, lam_p, lam_m) -> tuple[float, float]:
    gap = lam_p - lam_m
    if abs(gap) < DEGENERATE_EIGENVALUE_TOL:
        raise DegenerateOscillatorError(
            f"oscillator eigenvalues coincide within {DEGENERATE_EIGENVALUE_TOL}; "
            "perturbation amplitudes are singular")
    scale = 4.0 * omega_s * f_p * v0 / gap
    return scale * math.cos(2.0 * alpha), scale * math.sin(2.0 * alpha)


@dataclass(frozen=True)
class PrereqFlags:
    """The four applicability prerequisites for the separated-scales analysis."""

    exists: bool
    stable: bool
    fast: bool
    small_perturbation: bool

    @property
    def all_met(self) -> bool:
        return self.exists and self.stable and self.fast and self.small_perturbation

    def as_tuple(self):
        return (self.exists, self.stable, self.fast, self.small_perturbation)


@dataclass(frozen=True)
class EquilibriumOrbit:
    """A solved (or failed) equilibrium orbit with its local analysis.

    When ``prereq.exists`` is false every derived field is NaN.
    """

    w: float
    b: float
    v0: float
    f_p: float
    M0: float
    omega_plus: float
    omega_minus: float
    alpha_axis: float
    delta_w_amp: float
    delta_v_amp: float
    prereq: PrereqFlags

    @property
    def frequency_ratio(self) -> float:
        return self.f_p / kepler_frequency(self.b)


def perturbation_amplitudes(orbit: EquilibriumOrbit) -> tuple[float, float]:
    """Signed axial and radial response amplitudes of the driven oscillator.

    delta_w = 4 omega_s f_p v0 cos(2 alpha) / (omega_+^2 - omega_-^2)
    delta_v = 4 omega_s f_p v0 sin(2 alpha) / (omega_+^2 - omega_-^2)

    Requires a stable, non-degenerate oscillator.
    """
    if not orbit.prereq.exists:
        raise ValueError("no equilibrium orbit to perturb")
    if not orbit.prereq.stable:
        raise ValueError("perturbation amplitudes are defined for stable equilibria only")
    return _amplitudes(
        kepler_frequency(orbit.b), orbit.f_p, orbit.v0,
        orbit.alpha_axis, orbit.omega_plus**2, orbit.omega_minus**2)


_MISSING = float("nan")


def prerequisites(w: float, b: float) -> EquilibriumOrbit:
    """Solve the equilibrium at (w, b) and evaluate all four prerequisites.

    Flags: exists (a circular orbit around the axis exists), stable (the
    effective-potential Hessian is positive definite there), fast (the orbit
    frequency is at least 10x the stellar frequency), small_perturbation
    (the radial response amplitude is at most half the orbit radius).
    Propagates DegenerateEquilibriumError from the radius solver.
    """
    v0 = solve_equilibrium_radius(w, b)
    if v0 is None:
        flags = PrereqFlags(False, False, False, False)
        return EquilibriumOrbit(w, b, _MISSING, _MISSING, _MISSING, _MISSING,
                                _MISSING, _MISSING, _MISSING, _MISSING, flags)
    f_p = orbit_frequency(w, b, v0)
    modes = oscillator_eigensystem(w, b, v0)
    fast = f_p >= FREQUENCY_RATIO_MIN * kepler_frequency(b)
    dw_amp = dv_amp = _MISSING
    small = False
    if modes.stable:
        try:
            dw_amp, dv_amp = _amplitudes(kepler_frequency(b), f_p, v0,
                                         modes.alpha_axis, modes.lambda_plus, modes.lambda_minus)
            small = abs(dv_amp) <= PERTURBATION_MAX_FRACTION * v0
        except DegenerateOscillatorError:
            # amplitude formula singular; smallness cannot be certified
            small = False
    flags = PrereqFlags(True, modes.stable, bool(fast), bool(small))
    return EquilibriumOrbit(
        w=w, b=b, v0=v0, f_p=f_p, M0=f_p * v0 * v0,
        omega_plus=modes.omega_plus, omega_minus=modes.omega_minus,
        alpha_axis=modes.alpha_axis,
        delta_w_amp=dw_amp, delta_v_amp=dv_amp, prereq=flags)


# ---------------------------------------------------------------------------
# Boundary curves in the (w, b) plane
# ---------------------------------------------------------------------------

class BoundaryKind(Enum):
    STABILITY = "stability"
    FREQUENCY_RATIO = "frequency"
    PERTURBATION = "perturbation"


@dataclass(frozen=True)
class BoundaryPoint:
    kind: BoundaryKind
    star: Star
    b: float
    distance: float | None  # scaled distance from the chosen star; None = no crossing


def _distance_to_w(distance: float, star: Star) -> float:
    return distance if star is Star.LIGHTER else 1.0 - distance


def _predicate(kind: BoundaryKind) -> Callable[[EquilibriumOrbit], bool]:
    if kind is BoundaryKind.STABILITY:
        return lambda orb: orb.prereq.exists and orb.prereq.stable
    if kind is BoundaryKind.FREQUENCY_RATIO:
        return lambda orb: orb.prereq.exists and orb.prereq.fast
    return lambda orb: orb.prereq.exists and orb.prereq.stable and orb.prereq.small_perturbation


# Scan grid for locating the first predicate flip: geometric spacing resolves
# the small near-heavier regions at large b. The midpoint d = 0.5 counts as
# outside (at b = 1 it is the degenerate point and the stable region's edge).
_SCAN_MIN = 1e-5
_SCAN_POINTS = 220


def boundary_distance(kind: BoundaryKind, star: Star, b: float, *,
                      precision: float = 1e-6) -> float:
    """Distance from ``star`` of the first predicate flip, to |delta| < precision.

    Scans outward from the star on a geometric grid, brackets the first value
    change of the predicate and bisects. Raises NoCrossingError when the
    predicate is constant on (0, 0.5).
    """
    if b < 1.0:
        raise ValueError(f"mass ratio must satisfy b >= 1, got {b}")
    pred = _predicate(kind)

    def at(d: float) -> bool:
        if d >= 0.5:
            return False
        try:
            return pred(prerequisites(_distance_to_w(d, star), b))
        except DegenerateEquilibriumError:
            return False

    grid = np.geomspace(_SCAN_MIN, 0.5, _SCAN_POINTS)
    first = at(grid[0])
    lo = grid[0]
    hi = None
    for d in grid[1:]:
        if at(d) != first:
            hi = d
            break
        lo = d
    if hi is None:
        raise NoCrossingError(
            f"{kind.value} predicate is constant on (0, 0.5) for b = {b} ({star.value} star)")
    while hi - lo > precision:
        mid = 0.5 * (lo + hi)
        if at(mid) == first:
            lo = mid
        else:
            hi = mid
    return float(0.5 * (lo + hi))


def trace_boundary(kind: BoundaryKind, star: Star, b_values: Sequence[float], *,
                   precision: float = 1e-6) -> list[BoundaryPoint]:
    """Boundary polyline over a list of mass ratios.

    Per-b no-crossing cases are recorded with distance None rather than
    aborting the trace.
    """
    if len(b_values) == 0:
        raise ValueError("b_values must be nonempty")
    points = []
    for b in b_values:
        try:
            d = boundary_distance(kind, star, float(b), precision=precision)
        except NoCrossingError:
            d = None
        points.append(BoundaryPoint(kind=kind, star=star, b=float(b), distance=d))
    return points


def write_boundary_csv(points: Iterable[BoundaryPoint], path) -> None:
    """CSV export with header kind,star,b,w_boundary (empty cell = no crossing)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["kind", "star", "b", "w_boundary"])
        for p in points:
            writer.writerow([p.kind.value, p.star.value, repr(float(p.b)),
                             "" if p.distance is None else repr(float(p.distance))])
