"""Exception hierarchy shared by all modules."""


class ThermoWeylError(Exception):
    """Base class for library errors."""


class QuadratureFailure(ThermoWeylError):
    """Adaptive integration did not reach the requested tolerance."""


class NotDifferentiable(ThermoWeylError):
    """Weak derivative lies outside the test-function space (pure steps)."""


class NotIntegrable(ThermoWeylError):
    """Function has no finite integral / ordinary Fourier value at p = 0."""


class DivergentNorm(ThermoWeylError):
    """Thermal quadratic form is infinite for the given function."""


class BranchAmbiguity(ThermoWeylError):
    """Fractional power requested too close to the principal branch cut."""


class InsideCutoff(ThermoWeylError):
    """Exchange phase requested for a separation inside the UV cutoff."""


class InvalidKleinVector(ThermoWeylError):
    """Klein constants violate the odd-multiple-of-pi constraint."""


class ConfigTooLarge(ThermoWeylError):
    """Lattice configuration exceeds the Fock-space dimension cap."""


class DimensionMismatch(ThermoWeylError):
    """Operator and state live on different Fock spaces."""


class ExtrapolationFailure(ThermoWeylError):
    """Richardson extrapolation residual above tolerance."""


class IncompatibleStatistics(ThermoWeylError):
    """Crossed-product elements with different statistics parameters."""
