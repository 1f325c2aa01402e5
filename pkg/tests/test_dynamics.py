import math

import numpy as np
import pytest

from axialorbits import (
    Frame,
    FrameMismatchError,
    IntegratorConfig,
    PhaseState,
    SingularityError,
    Star,
    SystemConfig,
    acceleration_rotating,
    axial_angular_momentum,
    gravitational_acceleration,
    initial_conditions,
    integrate,
    jacobi_constant,
    jacobi_drift,
    prerequisites,
    star_centric_energy,
    torque_balance_residual,
    write_trajectory_csv,
)
from helpers import rk4_final_state

ICFG = IntegratorConfig()


def _equilibrium_state(w, b, cfg=None, phase=0.0, convention="rotating"):
    cfg = cfg or SystemConfig.from_mass_ratio(b)
    orbit = prerequisites(w, b)
    return initial_conditions(orbit, cfg, phase=phase, convention=convention), orbit, cfg


class TestAcceleration:
    def test_motionless_pure_two_center(self):
        cfg = SystemConfig.motionless(2.0)
        s = PhaseState(t=0.0, pos=[0.1, 0.5, -0.2], vel=[0.3, -0.1, 0.2],
                       frame=Frame.ROTATING)
        total = acceleration_rotating(s, cfg)
        grav = gravitational_acceleration(s.pos, cfg)
        np.testing.assert_allclose(total, grav, atol=1e-15)

    def test_centrifugal_at_rest_above_origin(self):
        cfg = SystemConfig.from_mass_ratio(1.0)
        s = PhaseState(t=0.0, pos=[0.0, 1.0, 0.0], vel=[0.0, 0.0, 0.0],
                       frame=Frame.ROTATING)
        acc = acceleration_rotating(s, cfg)
        grav = gravitational_acceleration(s.pos, cfg)
        np.testing.assert_allclose(acc - grav, [0.0, cfg.omega_s**2, 0.0], atol=1e-14)

    def test_collinear_balance_point(self):
        # root-find the x-axis balance point (zero net rotating-frame
        # acceleration at rest) and confirm the acceleration vanishes there
        cfg = SystemConfig.from_mass_ratio(2.0)

        def ax(x):
            s = PhaseState(t=0.0, pos=[x, 0.0, 0.0], vel=[0.0, 0.0, 0.0],
                           frame=Frame.ROTATING)
            return acceleration_rotating(s, cfg)[0]

        lo, hi = cfg.x_heavy + 0.05, cfg.x_light - 0.05
        flo = ax(lo)
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            fm = ax(mid)
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        x_balance = 0.5 * (lo + hi)
        s = PhaseState(t=0.0, pos=[x_balance, 0.0, 0.0], vel=[0.0, 0.0, 0.0],
                       frame=Frame.ROTATING)
        assert np.linalg.norm(acceleration_rotating(s, cfg)) < 1e-10

    def test_equal_mass_midpoint_is_balance_point(self):
        cfg = SystemConfig.from_mass_ratio(1.0)
        s = PhaseState(t=0.0, pos=[0.0, 0.0, 0.0], vel=[0.0, 0.0, 0.0],
                       frame=Frame.ROTATING)
        assert np.linalg.norm(acceleration_rotating(s, cfg)) < 1e-14

    def test_singularity_guard(self):
        cfg = SystemConfig.from_mass_ratio(1.0)
        with pytest.raises(SingularityError):
            gravitational_acceleration([cfg.x_light + 1e-9, 0.0, 0.0], cfg)

    def test_frame_check(self):
        cfg = SystemConfig.from_mass_ratio(1.0)
        s = PhaseState(t=0.0, pos=[0, 1, 0], vel=[0, 0, 0], frame=Frame.INERTIAL)
        with pytest.raises(FrameMismatchError):
            acceleration_rotating(s, cfg)

    def test_gravity_torque_has_no_axial_component(self):
        # both stars sit on the x axis, so r x a_grav never points along it
        rng = np.random.default_rng(19)
        count = 0
        while count < 1000:
            b = rng.uniform(1.0, 10.0)
            cfg = SystemConfig.from_mass_ratio(b)
            pos = rng.uniform(-1.0, 1.0, size=3)
            if (np.linalg.norm(pos - cfg.star_position(Star.LIGHTER)) < 0.5
                    or np.linalg.norm(pos - cfg.star_position(Star.HEAVIER)) < 0.5):
                continue
            acc = gravitational_acceleration(pos, cfg)
            torque_x = pos[1] * acc[2] - pos[2] * acc[1]
            assert abs(torque_x) < 1e-14
            count += 1


class TestInitialConditions:
    def test_phase_zero_layout(self):
        state, orbit, cfg = _equilibrium_state(0.2, 2.0)
        np.testing.assert_allclose(state.pos, [cfg.x_light - 0.2, orbit.v0, 0.0], atol=1e-15)
        np.testing.assert_allclose(state.vel, [0.0, 0.0, orbit.f_p * orbit.v0], atol=1e-15)

    def test_initial_m_is_circular_orbit_value(self):
        for phase in [0.0, 0.7, 2.1]:
            state, orbit, _ = _equilibrium_state(0.1, 1.0, phase=phase)
            assert axial_angular_momentum(state) == pytest.approx(orbit.M0, rel=1e-14)

    def test_inertial_convention_subtracts_transport(self):
        s_rot, orbit, cfg = _equilibrium_state(0.1, 1.0)
        s_in, _, _ = _equilibrium_state(0.1, 1.0, convention="inertial")
        transport = cfg.omega_s * np.array([-s_rot.pos[1], s_rot.pos[0], 0.0])
        np.testing.assert_allclose(s_in.vel, s_rot.vel - transport, atol=1e-14)

    def test_unknown_convention_rejected(self):
        orbit = prerequisites(0.1, 1.0)
        cfg = SystemConfig.from_mass_ratio(1.0)
        with pytest.raises(ValueError):
            initial_conditions(orbit, cfg, convention="galactic")

    def test_missing_equilibrium_rejected(self):
        orbit = prerequisites(0.45, 2.0)
        cfg = SystemConfig.from_mass_ratio(2.0)
        with pytest.raises(ValueError):
            initial_conditions(orbit, cfg)


class TestIntegrate:
    def test_motionless_stars_closed_circle(self):
        # the defining property of the initial condition: with the stars
        # pinned, the orbit is an exact circle
        cfg = SystemConfig.motionless(1.0)
        state, orbit, _ = _equilibrium_state(0.1, 1.0, cfg=cfg)
        period = 2 * math.pi / orbit.f_p
        traj = integrate(state, cfg, ICFG, 3 * period)
        radius = np.hypot(traj.pos[:, 1], traj.pos[:, 2])
        assert np.max(np.abs(radius - orbit.v0)) < 1e-10
        assert np.max(np.abs(traj.pos[:, 0] - state.pos[0])) < 1e-10

    def test_two_body_limit_kepler_circle(self):
        # drop the companion: a circular Kepler orbit about the lighter star
        cfg = SystemConfig.motionless(1.0)
        r = 0.3
        speed = math.sqrt(1.0 / r)
        state = PhaseState(t=0.0, pos=[cfg.x_light, r, 0.0], vel=[0.0, 0.0, speed],
                           frame=Frame.ROTATING)
        period = 2 * math.pi * math.sqrt(r**3)
        traj = integrate(state, cfg, ICFG, 5 * period, include_heavy=False)
        radius = np.linalg.norm(traj.pos - np.array([cfg.x_light, 0.0, 0.0]), axis=1)
        assert np.max(np.abs(radius - r)) < 5e-9

    def test_self_convergence_under_tolerance_halving(self):
        state, _, cfg = _equilibrium_state(0.0091, 25.809)
        coarse = integrate(state, cfg, IntegratorConfig(rel_tol=1e-10, abs_tol=1e-11),
                           cfg.stellar_period)
        fine = integrate(state, cfg, IntegratorConfig(rel_tol=5e-11, abs_tol=5e-12),
                         cfg.stellar_period)
        diff = np.max(np.abs(coarse.pos[-1] - fine.pos[-1]))
        # accumulated-local-error bound: tol per step times accepted steps
        n_steps = coarse.nfev / 12.0
        scale = max(1.0, float(np.max(np.abs(coarse.pos))))
        assert diff < 10.0 * 1e-10 * n_steps * scale
        assert diff < 1e-6

    def test_independent_rk4_oracle_agreement(self):
        # cross-check against the hand-written fixed-step integrator
        state, _, cfg = _equilibrium_state(0.0091, 25.809)
        t_end = cfg.stellar_period
        traj = integrate(state, cfg, ICFG, t_end)
        oracle = rk4_final_state(state, cfg, t_end, 200_000)
        assert np.max(np.abs(traj.pos[-1] - oracle[:3])) < 1e-6

    def test_jacobi_conservation(self):
        state, _, cfg = _equilibrium_state(0.0125, 1.0)
        traj = integrate(state, cfg, ICFG, cfg.stellar_period)
        assert jacobi_drift(traj) < 1e-9

    def test_torque_balance_along_trajectory(self):
        state, _, cfg = _equilibrium_state(0.0125, 1.0)
        traj = integrate(state, cfg, ICFG, cfg.stellar_period)
        assert torque_balance_residual(traj, cfg) < 1e-6

    def test_trajectory_m_matches_state_formula(self):
        state, _, cfg = _equilibrium_state(0.1, 1.0)
        traj = integrate(state, cfg, ICFG, 0.5 * cfg.stellar_period)
        for i in [0, len(traj) // 2, len(traj) - 1]:
            assert traj.m[i] == pytest.approx(axial_angular_momentum(traj.state(i)), abs=1e-14)

    def test_time_reversal(self):
        # the rotating-frame equations are invariant under
        # (x, y, z, vx, vy, vz; t) -> (x, -y, z, -vx, vy, -vz; -t), so
        # reflecting the endpoint and integrating forward again must land on
        # the reflected initial state
        state, _, cfg = _equilibrium_state(0.0125, 1.0)
        t_end = cfg.stellar_period
        fwd = integrate(state, cfg, ICFG, t_end)
        p, v = fwd.pos[-1], fwd.vel[-1]
        reflected = PhaseState(t=0.0, pos=[p[0], -p[1], p[2]],
                               vel=[-v[0], v[1], -v[2]], frame=Frame.ROTATING)
        back = integrate(reflected, cfg, ICFG, t_end)
        target_pos = np.array([state.pos[0], -state.pos[1], state.pos[2]])
        target_vel = np.array([-state.vel[0], state.vel[1], -state.vel[2]])
        n_steps = (fwd.nfev + back.nfev) / 12.0
        bound = 100.0 * ICFG.rel_tol * n_steps * max(1.0, float(np.max(np.abs(fwd.pos))))
        assert np.max(np.abs(back.pos[-1] - target_pos)) < bound
        assert np.max(np.abs(back.vel[-1] - target_vel)) < 10 * bound

    def test_dense_sampling_spans_interval(self):
        state, _, cfg = _equilibrium_state(0.1, 1.0)
        traj = integrate(state, cfg, ICFG, cfg.stellar_period)
        assert len(traj) == ICFG.dense_samples
        assert traj.t[0] == 0.0
        assert traj.t[-1] == pytest.approx(cfg.stellar_period, rel=1e-15)
        assert np.all(np.diff(traj.t) > 0)
        assert not traj.aborted

    def test_close_encounter_aborts_with_partial_data(self):
        # radial infall onto the lighter star with the stars pinned
        cfg = SystemConfig.motionless(1.0)
        state = PhaseState(t=0.0, pos=[cfg.x_light - 0.3, 0.0, 0.0],
                           vel=[1.0, 0.0, 0.0], frame=Frame.ROTATING)
        traj = integrate(state, cfg, ICFG, 5.0)
        assert traj.aborted
        assert traj.t[-1] < 5.0
        assert np.all(np.isfinite(traj.pos[-1]))
        assert traj.r_light[-1] < 1e-4  # stopped on approach, near the star

    def test_input_validation(self):
        state, _, cfg = _equilibrium_state(0.1, 1.0)
        with pytest.raises(ValueError):
            integrate(state, cfg, ICFG, -1.0)
        inertial = PhaseState(t=0.0, pos=[1, 0, 0], vel=[0, 0, 0], frame=Frame.INERTIAL)
        with pytest.raises(FrameMismatchError):
            integrate(inertial, cfg, ICFG, 1.0)
        with pytest.raises(ValueError):
            IntegratorConfig(dense_samples=10)
        with pytest.raises(ValueError):
            IntegratorConfig(rel_tol=2.0)


class TestJacobiConstant:
    def test_static_value(self):
        cfg = SystemConfig.from_mass_ratio(1.0)
        s = PhaseState(t=0.0, pos=[0.0, 1.0, 0.0], vel=[0.0, 0.0, 0.0],
                       frame=Frame.ROTATING)
        r = math.sqrt(0.25 + 1.0)
        expected = cfg.omega_s**2 + 2.0 / r + 2.0 / r
        assert jacobi_constant(s, cfg) == pytest.approx(expected, rel=1e-15)

    def test_reflection_symmetry(self):
        cfg = SystemConfig.from_mass_ratio(3.0)
        rng = np.random.default_rng(29)
        for _ in range(20):
            pos = rng.uniform(-1.5, 1.5, size=3)
            vel = rng.uniform(-1, 1, size=3)
            s = PhaseState(t=0.0, pos=pos, vel=vel, frame=Frame.ROTATING)
            mirrored = PhaseState(t=0.0, pos=[pos[0], -pos[1], -pos[2]],
                                  vel=[vel[0], -vel[1], -vel[2]], frame=Frame.ROTATING)
            assert jacobi_constant(s, cfg) == pytest.approx(
                jacobi_constant(mirrored, cfg), rel=1e-14)


class TestStarCentricEnergy:
    def test_circular_two_body_vis_viva(self):
        # isolated motionless star: e = -m/(2r) on a circular orbit
        cfg = SystemConfig.motionless(1.0)
        r = 0.25
        s = PhaseState(t=0.0, pos=[cfg.x_light, r, 0.0],
                       vel=[0.0, 0.0, math.sqrt(1.0 / r)], frame=Frame.ROTATING)
        e = star_centric_energy(s, cfg, Star.LIGHTER)
        assert e == pytest.approx(-1.0 / (2 * r), rel=1e-12)

    def test_distant_rest_state_sees_star_motion(self):
        cfg = SystemConfig.from_mass_ratio(3.0)
        s = PhaseState(t=0.0, pos=[1e6, 0.0, 0.0], vel=[0.0, -cfg.omega_s * 1e6, 0.0],
                       frame=Frame.ROTATING)  # at rest in the inertial frame
        e = star_centric_energy(s, cfg, Star.LIGHTER)
        v_star = cfg.omega_s * cfg.x_light
        assert e == pytest.approx(0.5 * v_star**2, rel=1e-5)

    def test_boundary_adjacent_orbit_unbinds(self):
        # near-lighter point at 0.98 of the stability boundary: starts bound
        # to its star and escapes within one stellar period
        state, _, cfg = _equilibrium_state(0.16976, 1.719)
        traj = integrate(state, cfg, ICFG, cfg.stellar_period)
        assert traj.bound_star is Star.LIGHTER
        assert traj.e_star[0] < 0.0
        assert traj.e_star[-1] > 0.0

    def test_accepts_both_frames(self):
        from axialorbits import rotating_to_inertial
        cfg = SystemConfig.from_mass_ratio(2.0)
        s = PhaseState(t=0.3, pos=[0.2, 0.5, 0.1], vel=[0.1, -0.2, 0.3],
                       frame=Frame.ROTATING)
        e_rot = star_centric_energy(s, cfg, Star.HEAVIER)
        e_in = star_centric_energy(rotating_to_inertial(s, cfg.omega_s), cfg, Star.HEAVIER)
        assert e_rot == pytest.approx(e_in, rel=1e-12)


class TestTrajectoryExport:
    def test_csv_round_trip(self, tmp_path):
        import csv as csvmod
        state, _, cfg = _equilibrium_state(0.1, 1.0)
        traj = integrate(state, cfg, IntegratorConfig(dense_samples=1000), 0.3)
        path = tmp_path / "traj.csv"
        write_trajectory_csv(traj, cfg, path)
        with open(path) as fh:
            rows = list(csvmod.DictReader(fh))
        assert len(rows) == len(traj)
        assert set(rows[0]) == {"t", "x", "y", "z", "vx", "vy", "vz", "frame",
                                "M", "jacobi", "r_light", "r_heavy", "e_star"}
        i = len(traj) // 2
        assert float(rows[i]["x"]) == traj.pos[i, 0]
        assert float(rows[i]["M"]) == traj.m[i]
        assert rows[i]["frame"] == "rotating"

    def test_inertial_export_rotates_positions(self, tmp_path):
        import csv as csvmod
        state, _, cfg = _equilibrium_state(0.1, 1.0)
        traj = integrate(state, cfg, IntegratorConfig(dense_samples=1000), 0.3)
        path = tmp_path / "traj_in.csv"
        write_trajectory_csv(traj, cfg, path, frame=Frame.INERTIAL)
        with open(path) as fh:
            rows = list(csvmod.DictReader(fh))
        i = len(traj) - 1
        theta = cfg.omega_s * traj.t[i]
        x_expected = (math.cos(theta) * traj.pos[i, 0] - math.sin(theta) * traj.pos[i, 1])
        assert float(rows[i]["x"]) == pytest.approx(x_expected, rel=1e-14)
        assert rows[i]["frame"] == "inertial"
