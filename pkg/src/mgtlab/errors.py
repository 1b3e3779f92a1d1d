"""Exception taxonomy shared by all modules."""


class MgtLabError(Exception):
    """Base class for all errors raised by this package."""


class MassRestrictionViolated(MgtLabError):
    """Kernel mass is outside the interval required by the operation."""


class NotSubcritical(MgtLabError):
    """Operation requires gamma < alpha*beta."""


class NegativeTime(MgtLabError):
    """Kernel or trajectory queried at a negative time."""


class SingularDiagonal(MgtLabError):
    """Implicit diagonal of the Volterra march vanished (step too large)."""


class NoConvergence(MgtLabError):
    """Iterative root refinement exhausted its sweep budget."""


class NoSignChange(MgtLabError):
    """Real-part function is nonpositive at x=0: no positive root bracketed.

    Carries the value at zero in ``f0`` so callers can report how far the
    decay rate delta is from the growth threshold.
    """

    def __init__(self, message: str, f0: float):
        super().__init__(message)
        self.f0 = f0


class DenominatorNonNegative(MgtLabError):
    """Rotation-coefficient denominator was not strictly negative."""


class RepeatedRoots(MgtLabError):
    """Characteristic roots too close for the exponential solution basis."""


class InvalidStep(MgtLabError):
    """Step size is nonpositive, too large for the horizon, or does not
    divide it where required."""


class TooShort(MgtLabError):
    """Trajectory has too few nodes for finite-difference residuals."""


class GridMismatch(MgtLabError):
    """Trajectories do not share a common time grid."""


class NonPositiveEnergy(MgtLabError):
    """Log-space growth fit requested on a window where F is not positive."""


class HorizonTooShort(MgtLabError):
    """Series does not cover enough checkpoint times t_n = 2*pi*n/q."""


class InvalidKernelTable(MgtLabError):
    """Tabulated kernel data failed validation."""


class ConfigError(MgtLabError):
    """Scenario or sweep configuration failed validation."""
