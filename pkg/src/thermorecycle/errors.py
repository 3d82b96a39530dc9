"""Exception hierarchy shared across the package."""


class ThermoRecycleError(Exception):
    """Base class for all package errors."""


class InvalidStateError(ThermoRecycleError, ValueError):
    """A matrix violates the density-matrix invariants."""


class ShapeError(ThermoRecycleError, ValueError):
    """Subsystem dimensions do not match the operand."""


class InvalidOperatorError(ThermoRecycleError, ValueError):
    """An operator expected to be unitary (or a valid channel) is not."""


class NormalizationError(ThermoRecycleError, ValueError):
    """A pure state vector is not normalized."""


class DegenerateBranchError(ThermoRecycleError, ValueError):
    """A measurement outcome has (numerically) zero probability."""

    def __init__(self, message, probability=0.0):
        super().__init__(message)
        self.probability = probability


class DomainError(ThermoRecycleError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InfeasibleError(ThermoRecycleError, ValueError):
    """A requested entropy exceeds what the finite bath can hold."""


class InfeasibleEntropyError(InfeasibleError):
    """No positive-temperature Gibbs state has the requested entropy."""


class InfeasibleErasureError(InfeasibleError):
    """No final bath state can absorb the requested entropy increase."""


class InfeasibleMixtureError(InfeasibleError):
    """Discarding branch labels pushes the bath past its entropy ceiling."""

    def __init__(self, message, g_bar=None, chi=None):
        super().__init__(message)
        self.g_bar = g_bar
        self.chi = chi


class ThresholdOutOfRangeError(ThermoRecycleError, ValueError):
    """The gain has no sign change on the admissible entropy interval."""

    def __init__(self, message, sign_at_low=0, sign_at_high=0):
        super().__init__(message)
        self.sign_at_low = sign_at_low
        self.sign_at_high = sign_at_high


class PhaseEncodingError(ThermoRecycleError, ValueError):
    """Eigenphases do not land exactly on clock basis states."""


class InsufficientDataError(ThermoRecycleError, ValueError):
    """Too few usable points for a regression."""


class ConfigError(ThermoRecycleError, ValueError):
    """Malformed or unknown configuration entry."""

    def __init__(self, message, line=None, key=None):
        super().__init__(message)
        self.line = line
        self.key = key
