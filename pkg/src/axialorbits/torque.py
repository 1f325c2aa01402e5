"""Axial angular momentum and the torques that drive it in the rotating frame.

The planet's angular-momentum projection on the interstellar axis is
M = y z' - z y'. Gravity from stars on the axis exerts no axial torque, so
M evolves only under the Coriolis torque T1 = 2 omega z x' and the
centrifugal torque T2 = -omega^2 y z. Modelling the orbit as a circle of
radius rho and frequency f whose center sits on the axis at x1(t) and whose
plane is tilted by alpha(t) (normal kept in the stellar orbital plane) turns
the torque balance M' = T1 + T2 into a differential system for alpha and x1
whose only solution is uniform co-rotation of the tilt, alpha = omega t +
alpha0 with x1 fixed. Along that solution M swings sinusoidally at the
stellar frequency instead of being conserved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from .core import Frame, PhaseState

_FD_STEP = 1e-6  # central-difference step for derivatives not supplied by a law


def axial_angular_momentum(state: PhaseState) -> float:
    """M = y vz - z vy for a rotating-frame state."""
    state.require_frame(Frame.ROTATING)
    return float(state.pos[1] * state.vel[2] - state.pos[2] * state.vel[1])


def coriolis_torque(state: PhaseState, omega: float) -> float:
    """Axial torque of the Coriolis force: 2 omega z vx."""
    state.require_frame(Frame.ROTATING)
    return 2.0 * omega * float(state.pos[2] * state.vel[0])


def centrifugal_torque(state: PhaseState, omega: float) -> float:
    """Axial torque of the centrifugal force: -omega^2 y z."""
    state.require_frame(Frame.ROTATING)
    return -omega * omega * float(state.pos[1] * state.pos[2])


@dataclass(frozen=True)
class AnsatzParams:
    """Tilted-circle orbit model: radius rho, orbit frequency f, stellar
    frequency omega, initial tilt alpha0 and fixed center x0."""

    rho: float
    f: float
    omega: float
    alpha0: float = 0.0
    x0: float = 0.0

    def __post_init__(self):
        if self.rho <= 0 or self.f <= 0 or self.omega < 0:
            raise ValueError("require rho > 0, f > 0, omega >= 0")


@dataclass(frozen=True)
class TiltLaw:
    """Time laws for the tilt angle and the orbit-center position.

    ``alpha_ddot`` may be omitted; consumers then fall back to a central
    finite difference of ``alpha_dot`` (accuracy ~1e-6 instead of exact).
    """

    alpha: Callable[[float], float]
    alpha_dot: Callable[[float], float]
    x1: Callable[[float], float]
    x1_dot: Callable[[float], float]
    alpha_ddot: Callable[[float], float] | None = None

    def alpha_second(self, t: float) -> float:
        if self.alpha_ddot is not None:
            return self.alpha_ddot(t)
        return (self.alpha_dot(t + _FD_STEP) - self.alpha_dot(t - _FD_STEP)) / (2.0 * _FD_STEP)

    @classmethod
    def constant(cls, alpha0: float, x0: float = 0.0) -> "TiltLaw":
        return cls(alpha=lambda t: alpha0, alpha_dot=lambda t: 0.0,
                   x1=lambda t: x0, x1_dot=lambda t: 0.0, alpha_ddot=lambda t: 0.0)

    @classmethod
    def uniform(cls, alpha0: float, rate: float, x0: float = 0.0) -> "TiltLaw":
        return cls(alpha=lambda t: rate * t + alpha0, alpha_dot=lambda t: rate,
                   x1=lambda t: x0, x1_dot=lambda t: 0.0, alpha_ddot=lambda t: 0.0)

    @classmethod
    def polynomial(cls, coeffs, x0: float = 0.0) -> "TiltLaw":
        """alpha(t) = sum coeffs[k] t^k with exact derivatives."""
        c = [float(x) for x in coeffs]
        d1 = [k * c[k] for k in range(1, len(c))]
        d2 = [k * d1[k] for k in range(1, len(d1))]

        def horner(cs, t):
            acc = 0.0
            for a in reversed(cs):
                acc = acc * t + a
            return acc

        return cls(alpha=lambda t: horner(c, t), alpha_dot=lambda t: horner(d1, t),
                   x1=lambda t: x0, x1_dot=lambda t: 0.0,
                   alpha_ddot=lambda t: horner(d2, t))


def analytic_solution(alpha0: float, omega: float, x0: float = 0.0) -> TiltLaw:
    """The unique tilt law compatible with the torque balance:
    alpha(t) = omega t + alpha0 with the orbit center fixed at x0."""
    return TiltLaw.uniform(alpha0, omega, x0)


def ansatz_state(p: AnsatzParams, law: TiltLaw, t: float) -> PhaseState:
    """Rotating-frame state of the tilted-circle model at time t.

    Position:
        x = x1(t) + rho sin(alpha) cos(f t)
        y = rho cos(alpha) cos(f t)
        z = rho sin(f t)
    Velocity: exact time derivative through alpha(t) and x1(t).
    """
    a = law.alpha(t)
    ad = law.alpha_dot(t)
    sa, ca = math.sin(a), math.cos(a)
    cf, sf = math.cos(p.f * t), math.sin(p.f * t)
    pos = (law.x1(t) + p.rho * sa * cf,
           p.rho * ca * cf,
           p.rho * sf)
    vel = (law.x1_dot(t) + p.rho * (ca * ad * cf - sa * p.f * sf),
           p.rho * (-sa * ad * cf - ca * p.f * sf),
           p.rho * p.f * cf)
    return PhaseState(t=t, pos=pos, vel=vel, frame=Frame.ROTATING)


def ansatz_M(p: AnsatzParams, law: TiltLaw, t: float) -> float:
    """Closed-form axial angular momentum of the tilted-circle model:

    M(t) = (1/2) rho^2 sin(2 f t) sin(alpha) alpha' + f rho^2 cos(alpha)
    """
    a = law.alpha(t)
    return (0.5 * p.rho**2 * math.sin(2.0 * p.f * t) * math.sin(a) * law.alpha_dot(t)
            + p.f * p.rho**2 * math.cos(a))


def ansatz_M_dot(p: AnsatzParams, law: TiltLaw, t: float) -> float:
    """Closed-form dM/dt of the tilted-circle model:

    M'(t) = (1/2) rho^2 sin(2 f t) (sin(alpha) alpha'' + cos(alpha) alpha'^2)
            + f rho^2 sin(alpha) alpha' (cos(2 f t) - 1)
    """
    a = law.alpha(t)
    ad = law.alpha_dot(t)
    add = law.alpha_second(t)
    sa, ca = math.sin(a), math.cos(a)
    return (0.5 * p.rho**2 * math.sin(2.0 * p.f * t) * (sa * add + ca * ad * ad)
            + p.f * p.rho**2 * sa * ad * (math.cos(2.0 * p.f * t) - 1.0))


def ansatz_torques(p: AnsatzParams, law: TiltLaw, t: float) -> tuple[float, float]:
    """Closed-form (T1, T2) of the tilted-circle model:

    T1 = rho^2 omega sin(2 f t) cos(alpha) alpha'
         + f rho^2 omega cos(2 f t) sin(alpha)
         - rho omega (f rho sin(alpha) - 2 sin(f t) x1')
    T2 = -(1/2) rho^2 omega^2 sin(2 f t) cos(alpha)
    """
    a = law.alpha(t)
    sa, ca = math.sin(a), math.cos(a)
    s2f, c2f = math.sin(2.0 * p.f * t), math.cos(2.0 * p.f * t)
    t1 = (p.rho**2 * p.omega * s2f * ca * law.alpha_dot(t)
          + p.f * p.rho**2 * p.omega * c2f * sa
          - p.rho * p.omega * (p.f * p.rho * sa - 2.0 * math.sin(p.f * t) * law.x1_dot(t)))
    t2 = -0.5 * p.rho**2 * p.omega**2 * s2f * ca
    return t1, t2


def balance_residual(p: AnsatzParams, law: TiltLaw, t: float) -> float:
    """Torque-balance defect M'(t) - T1(t) - T2(t) of the model.

    Identically zero along the analytic solution; generically nonzero for
    any other tilt law when the stars rotate.
    """
    t1, t2 = ansatz_torques(p, law, t)
    return ansatz_M_dot(p, law, t) - t1 - t2


def residual_system(law: TiltLaw, omega: float, t: float) -> tuple[float, float, float]:
    """The three residuals whose simultaneous vanishing forces the solution:

    r1 = alpha'' sin(alpha) + cos(alpha) (omega - alpha')^2
    r2 = sin(alpha) (omega - alpha')
    r3 = x1'
    """
    a = law.alpha(t)
    ad = law.alpha_dot(t)
    r1 = law.alpha_second(t) * math.sin(a) + math.cos(a) * (omega - ad) ** 2
    r2 = math.sin(a) * (omega - ad)
    r3 = law.x1_dot(t)
    return r1, r2, r3


def solution_axial_momentum(p: AnsatzParams, t: float) -> float:
    """M(t) along the analytic solution (alpha = omega t + alpha0):

    M(t) = f rho^2 cos(omega t + alpha0)
           + (1/2) rho^2 omega sin(2 f t) sin(omega t + alpha0)

    For f >> omega the first term dominates: M is approximately sinusoidal
    at the stellar frequency and is not conserved over a stellar period.
    """
    phase = p.omega * t + p.alpha0
    return (p.f * p.rho**2 * math.cos(phase)
            + 0.5 * p.rho**2 * p.omega * math.sin(2.0 * p.f * t) * math.sin(phase))
