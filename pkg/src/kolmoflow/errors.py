"""Exception taxonomy shared across the package.

Exit-code mapping used by the CLI: ConfigError -> 2, DataError -> 3,
NumericError and TrainingError -> 4.
"""


class KolmoflowError(Exception):
    """Base class for all package errors."""


class ConfigError(KolmoflowError):
    """Invalid configuration: bad grid sizes, malformed config files, bad splits."""


class DataError(KolmoflowError):
    """Malformed or misaligned data: bad dataset files, mismatched frame counts."""


class ShapeError(KolmoflowError):
    """Tensor shape mismatch. The message names both offending shapes."""


class NumericError(KolmoflowError):
    """Non-finite values or other numerical failures outside training."""


class StepSizeError(NumericError):
    """Timestep violates the CFL bound. Carries the admissible dt."""

    def __init__(self, dt: float, admissible_dt: float):
        self.dt = dt
        self.admissible_dt = admissible_dt
        super().__init__(
            f"dt={dt:g} violates the CFL bound; admissible dt <= {admissible_dt:g}"
        )


class BlowupError(NumericError):
    """Solver produced non-finite values. Carries the simulation time."""

    def __init__(self, time: float):
        self.time = time
        super().__init__(f"non-finite vorticity at t={time:g}")


class TrainingError(KolmoflowError):
    """Training diverged (NaN loss or gradient). Carries step and/or parameter name."""


class ContractError(KolmoflowError):
    """An operation was called outside its contract (e.g. backward on a non-scalar)."""


class MetricError(KolmoflowError):
    """A diagnostic metric could not be computed (e.g. empty wavenumber band)."""
