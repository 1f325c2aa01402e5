"""Shared test oracles, independent of the library's own numerical paths."""

import numpy as np
from numba import njit

from axialorbits import Frame, PhaseState, SystemConfig


@njit(cache=True)
def _deriv6(s, b, omega, xl, xh):
    x, yy, z, vx, vy, vz = s
    dx1 = x - xl
    dx2 = x - xh
    r1 = (dx1 * dx1 + yy * yy + z * z) ** 1.5
    r2 = (dx2 * dx2 + yy * yy + z * z) ** 1.5
    ax = -dx1 / r1 - b * dx2 / r2 + 2.0 * omega * vy + omega * omega * x
    ay = -yy / r1 - b * yy / r2 - 2.0 * omega * vx + omega * omega * yy
    az = -z / r1 - b * z / r2
    return np.array([vx, vy, vz, ax, ay, az])


@njit(cache=True)
def _rk4_core(y, t0, t1, n_steps, b, omega, xl, xh):
    # classical fixed-step RK4 on the rotating-frame equations, written
    # independently of the package RHS
    h = (t1 - t0) / n_steps
    out = y.copy()
    for _ in range(n_steps):
        k1 = _deriv6(out, b, omega, xl, xh)
        k2 = _deriv6(out + 0.5 * h * k1, b, omega, xl, xh)
        k3 = _deriv6(out + 0.5 * h * k2, b, omega, xl, xh)
        k4 = _deriv6(out + h * k3, b, omega, xl, xh)
        out = out + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return out


@njit(cache=True)
def _rk4_sampled(y, t0, t1, n_steps, stride, b, omega, xl, xh):
    h = (t1 - t0) / n_steps
    n_out = n_steps // stride + 1
    ts = np.empty(n_out)
    ys = np.empty((n_out, 6))
    ts[0] = t0
    ys[0] = y
    out = y.copy()
    j = 1
    for i in range(n_steps):
        k1 = _deriv6(out, b, omega, xl, xh)
        k2 = _deriv6(out + 0.5 * h * k1, b, omega, xl, xh)
        k3 = _deriv6(out + 0.5 * h * k2, b, omega, xl, xh)
        k4 = _deriv6(out + h * k3, b, omega, xl, xh)
        out = out + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if (i + 1) % stride == 0:
            ts[j] = t0 + (i + 1) * h
            ys[j] = out
            j += 1
    return ts[:j], ys[:j]


def rk4_final_state(state0: PhaseState, cfg: SystemConfig, t_end: float,
                    n_steps: int) -> np.ndarray:
    """Fixed-step classical RK4 endpoint, the independent integration oracle."""
    y0 = np.concatenate([state0.pos, state0.vel])
    return _rk4_core(y0, 0.0, t_end, n_steps, cfg.b, cfg.omega_s,
                     cfg.x_light, cfg.x_heavy)


def rk4_sampled(state0: PhaseState, cfg: SystemConfig, t_end: float,
                n_steps: int, stride: int):
    """RK4 trajectory sampled every ``stride`` steps: (times, (n, 6) states)."""
    y0 = np.concatenate([state0.pos, state0.vel])
    return _rk4_sampled(y0, 0.0, t_end, n_steps, stride, cfg.b, cfg.omega_s,
                        cfg.x_light, cfg.x_heavy)


def oracle_equilibrium_radius(w, b, n_scan=1_000_000):
    """Dense sign-change scan plus plain bisection; no scipy involved."""
    vs = np.linspace(1e-6, 10.0, n_scan)
    r1sq = w * w + vs * vs
    r2sq = (1.0 - w) ** 2 + vs * vs
    g = w / r1sq**1.5 - b * (1.0 - w) / r2sq**1.5
    flips = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    if flips.size == 0:
        return None
    lo, hi = vs[flips[0]], vs[flips[0] + 1]

    def gv(v):
        return w / (w * w + v * v) ** 1.5 - b * (1.0 - w) / ((1.0 - w) ** 2 + v * v) ** 1.5

    glo = gv(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        gm = gv(mid)
        if gm == 0.0:
            return mid
        if (gm > 0) == (glo > 0):
            lo, glo = mid, gm
        else:
            hi = mid
        if hi - lo < 1e-15:
            break
    return 0.5 * (lo + hi)


def fd_hessian_effective_potential(w, v, b, M, h=1e-5, dps=40):
    """Central-difference Hessian of the effective potential at step h,
    evaluated in extended precision so the oracle's own roundoff does not
    mask the comparison (at h = 1e-5 the double-precision second-difference
    noise floor is itself ~1e-6 relative)."""
    from mpmath import mp, mpf, sqrt as msqrt

    mp.dps = dps

    def U(wp, vp):
        r1 = msqrt(wp * wp + vp * vp)
        r2 = msqrt((1 - wp) ** 2 + vp * vp)
        return -1 / r1 - mpf(b) / r2 + mpf(M) ** 2 / (2 * vp * vp)

    w, v, hh = mpf(w), mpf(v), mpf(h)
    hww = (U(w + hh, v) - 2 * U(w, v) + U(w - hh, v)) / hh**2
    hvv = (U(w, v + hh) - 2 * U(w, v) + U(w, v - hh)) / hh**2
    hwv = (U(w + hh, v + hh) - U(w + hh, v - hh)
           - U(w - hh, v + hh) + U(w - hh, v - hh)) / (4 * hh**2)
    return np.array([[float(hww), float(hwv)], [float(hwv), float(hvv)]])


def random_rotating_state(rng, t_range=10.0) -> PhaseState:
    return PhaseState(t=float(rng.uniform(0, t_range)),
                      pos=rng.uniform(-2, 2, size=3),
                      vel=rng.uniform(-2, 2, size=3),
                      frame=Frame.ROTATING)
