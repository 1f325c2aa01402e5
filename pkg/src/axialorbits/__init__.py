"""Planetary orbits initially orthogonal to the interstellar axis of a
circular binary: equilibrium analysis with motionless stars, rotating-frame
torque balance, numerical integration and a one-stellar-period survey that
classifies each orbit as planar, nonplanar or unbound."""

__version__ = "1.0.0"

from .core import (
    Frame,
    PhaseState,
    Star,
    SystemConfig,
    inertial_to_rotating,
    kepler_frequency,
    rotating_to_inertial,
)
from .dynamics import (
    IntegratorConfig,
    Trajectory,
    acceleration_rotating,
    gravitational_acceleration,
    initial_conditions,
    integrate,
    jacobi_constant,
    jacobi_drift,
    star_centric_energy,
    torque_balance_residual,
    write_trajectory_csv,
)
from .equilibrium import (
    BoundaryKind,
    BoundaryPoint,
    EquilibriumOrbit,
    OscillatorModes,
    PrereqFlags,
    axial_residual,
    boundary_distance,
    effective_potential,
    orbit_frequency,
    oscillator_eigensystem,
    perturbation_amplitudes,
    potential_gradient,
    potential_hessian,
    prerequisites,
    solve_equilibrium_radius,
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
    ClassificationResult,
    GridPoint,
    GridSpec,
    SurveyRow,
    Verdict,
    build_grid,
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
    TiltLaw,
    analytic_solution,
    ansatz_M,
    ansatz_M_dot,
    ansatz_state,
    ansatz_torques,
    axial_angular_momentum,
    balance_residual,
    centrifugal_torque,
    coriolis_torque,
    residual_system,
    solution_axial_momentum,
)
