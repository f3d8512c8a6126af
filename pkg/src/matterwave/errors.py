"""Exception types raised across the package."""


class MatterWaveError(ValueError):
    """Base class for invalid inputs and failed preconditions."""


class InvalidConstant(MatterWaveError):
    pass


class InvalidParameter(MatterWaveError):
    pass


class SuperluminalElectron(MatterWaveError):
    pass


class ZeroVelocity(MatterWaveError):
    pass


class InvalidFrequency(InvalidParameter):
    pass


class InvalidWavelength(InvalidParameter):
    pass


class InvalidFactor(InvalidParameter):
    pass


class DispersionMismatch(MatterWaveError):
    """Raised when omega, k and u violate the phase-velocity relation."""


class GridTooSmall(MatterWaveError):
    pass


class UnknownChannel(KeyError):
    pass


class QuadratureTooCoarse(MatterWaveError):
    pass


class SuperluminalBoost(MatterWaveError):
    pass


class UnsupportedBoostAxis(MatterWaveError):
    pass


class ConfigError(MatterWaveError):
    """Malformed or inconsistent run configuration."""
