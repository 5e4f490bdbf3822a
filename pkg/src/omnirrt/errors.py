"""Exception types raised across the package."""


class ContractError(ValueError):
    """A precondition of an operation was violated by the caller."""


class DegenerateAxisError(ContractError):
    """Start and end of a path coincide, so no SG-axis can be built."""


class InfeasibleSpheroidError(ContractError):
    """Transverse diameter is shorter than the distance between the foci."""


class UnsupportedDimensionError(ContractError):
    pass


class SamplingExhaustedError(RuntimeError):
    """A rejection loop hit its attempt cap without producing a sample."""


class ConfigurationError(ValueError):
    """An environment or scenario file could not be loaded."""
