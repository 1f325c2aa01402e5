"""Exception types shared across the library."""


class FrameMismatchError(ValueError):
    """A phase-space state was passed in the wrong reference frame."""


class SingularityError(ValueError):
    """Evaluation requested at (or too close to) a gravitational singularity."""


class DegenerateEquilibriumError(ValueError):
    """Equal masses at the midpoint: the force balance holds for every radius,
    so the equilibrium radius is undetermined."""


class DegenerateOscillatorError(ValueError):
    """The two oscillator eigenfrequencies coincide; the perturbation-amplitude
    formula is singular there."""


class NoCrossingError(RuntimeError):
    """A boundary predicate never changes value on the scanned interval."""


class EmptyTrajectoryError(ValueError):
    """Classification requested for a trajectory with no usable samples."""
