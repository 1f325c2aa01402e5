"""Scaled units, binary geometry, phase-space states and frame transformations.

Units throughout the library: the gravitational constant, the separation of
the two stars, and the mass of the lighter star are all 1. The mass ratio
``b >= 1`` is heavier over lighter. In the rotating frame the stars sit on
the x axis with the center of mass at the origin and the +x axis pointing
from the heavier star to the lighter one; the frame rotates about +z at the
Kepler rate ``omega_s = sqrt(1 + b)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import FrameMismatchError


class Frame(Enum):
    ROTATING = "rotating"
    INERTIAL = "inertial"


class Star(Enum):
    LIGHTER = "lighter"
    HEAVIER = "heavier"


def kepler_frequency(b: float) -> float:
    """Scaled angular frequency of the circular binary, sqrt(1 + b).

    Raises ValueError if b < 1: callers must normalize so the lighter star
    has unit mass.
    """
    if b < 1.0:
        raise ValueError(f"mass ratio must satisfy b >= 1 (lighter star has mass 1), got {b}")
    return math.sqrt(1.0 + b)


@dataclass(frozen=True)
class SystemConfig:
    """Binary geometry and rotation rate in scaled units.

    ``x_light`` and ``x_heavy`` are the fixed star x coordinates in the
    rotating frame. They satisfy x_light - x_heavy = 1 (unit separation)
    and x_light + b * x_heavy = 0 (center of mass at the origin).
    """

    b: float
    omega_s: float
    x_light: float
    x_heavy: float

    @classmethod
    def from_mass_ratio(cls, b: float) -> "SystemConfig":
        """Circular binary rotating at the Kepler rate."""
        omega = kepler_frequency(b)
        x_light = b / (1.0 + b)
        return cls(b=float(b), omega_s=omega, x_light=x_light, x_heavy=x_light - 1.0)

    @classmethod
    def motionless(cls, b: float) -> "SystemConfig":
        """Stars pinned in place (omega_s = 0); the frame is then inertial."""
        if b < 1.0:
            raise ValueError(f"mass ratio must satisfy b >= 1, got {b}")
        x_light = b / (1.0 + b)
        return cls(b=float(b), omega_s=0.0, x_light=x_light, x_heavy=x_light - 1.0)

    @property
    def stellar_period(self) -> float:
        """One full turn of the binary, 2*pi/omega_s."""
        if self.omega_s == 0.0:
            return math.inf
        return 2.0 * math.pi / self.omega_s

    def star_position(self, star: Star) -> np.ndarray:
        x = self.x_light if star is Star.LIGHTER else self.x_heavy
        return np.array([x, 0.0, 0.0])

    def star_mass(self, star: Star) -> float:
        return 1.0 if star is Star.LIGHTER else self.b


@dataclass(frozen=True)
class PhaseState:
    """Planet position and velocity at time t, tagged with its frame.

    No operation in the library mixes frames implicitly; every consumer
    checks the tag and raises FrameMismatchError on a mismatch.
    """

    t: float
    pos: np.ndarray
    vel: np.ndarray
    frame: Frame

    def __post_init__(self):
        object.__setattr__(self, "pos", np.asarray(self.pos, dtype=float))
        object.__setattr__(self, "vel", np.asarray(self.vel, dtype=float))
        if self.pos.shape != (3,) or self.vel.shape != (3,):
            raise ValueError("pos and vel must be 3-vectors")

    def require_frame(self, frame: Frame) -> None:
        if self.frame is not frame:
            raise FrameMismatchError(f"expected a {frame.value}-frame state, got {self.frame.value}")


def _rot_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rotating_to_inertial(state: PhaseState, omega_s: float) -> PhaseState:
    """Map a rotating-frame state to the inertial frame.

    The rotating axes are at angle omega_s * t in the inertial frame, so
    positions rotate by that angle about z and velocities pick up the frame
    transport term: v_in = R(theta) (v_rot + omega_s * z_hat x r_rot).
    """
    state.require_frame(Frame.ROTATING)
    theta = omega_s * state.t
    R = _rot_z(theta)
    x, y, z = state.pos
    transport = omega_s * np.array([-y, x, 0.0])
    return PhaseState(state.t, R @ state.pos, R @ (state.vel + transport), Frame.INERTIAL)


def inertial_to_rotating(state: PhaseState, omega_s: float) -> PhaseState:
    """Exact inverse of rotating_to_inertial."""
    state.require_frame(Frame.INERTIAL)
    theta = omega_s * state.t
    R = _rot_z(-theta)
    pos = R @ state.pos
    x, y, z = pos
    transport = omega_s * np.array([-y, x, 0.0])
    return PhaseState(state.t, pos, R @ state.vel - transport, Frame.ROTATING)


def rotate_z_array(theta, vecs):
    """Rotate an (n, 3) array of vectors about z by per-row angles theta."""
    theta = np.asarray(theta, dtype=float)
    vecs = np.asarray(vecs, dtype=float)
    c, s = np.cos(theta), np.sin(theta)
    out = np.empty_like(vecs)
    out[:, 0] = c * vecs[:, 0] - s * vecs[:, 1]
    out[:, 1] = s * vecs[:, 0] + c * vecs[:, 1]
    out[:, 2] = vecs[:, 2]
    return out


def star_inertial_position(cfg: SystemConfig, star: Star, t):
    """Inertial position of a star at time t (scalar or array)."""
    t = np.asarray(t, dtype=float)
    xs = cfg.x_light if star is Star.LIGHTER else cfg.x_heavy
    theta = cfg.omega_s * t
    return np.stack([xs * np.cos(theta), xs * np.sin(theta), np.zeros_like(theta)], axis=-1)


def star_inertial_velocity(cfg: SystemConfig, star: Star, t):
    """Inertial velocity of a star at time t (scalar or array)."""
    t = np.asarray(t, dtype=float)
    xs = cfg.x_light if star is Star.LIGHTER else cfg.x_heavy
    theta = cfg.omega_s * t
    w = cfg.omega_s
    return np.stack([-xs * w * np.sin(theta), xs * w * np.cos(theta), np.zeros_like(theta)], axis=-1)
