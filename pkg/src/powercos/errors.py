"""Exception types shared across the package."""


class PowercosError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(PowercosError):
    """Invalid experiment configuration or config file (CLI exit code 2)."""


class NumericalError(PowercosError):
    """A numerical routine failed or produced unusable results (CLI exit code 3)."""


class DegenerateStateError(NumericalError):
    """State norm fell below the representable threshold (measure-zero branch)."""


class ResonanceError(NumericalError):
    """Resonant time step is undefined because the ground energy is (near) zero."""


class ResourceLimitError(PowercosError):
    """Requested dense computation exceeds the configured qubit cap."""


class FilterAbort(PowercosError):
    """Sampled ancilla readout came out 1: the trajectory is aborted.

    Raised by the sampled filter step and caught by the trajectory driver,
    which records the abort instead of failing.
    """

    def __init__(self, message="ancilla readout 1: trajectory aborted"):
        super().__init__(message)
