"""Exception types shared across the package."""


class ResLRUError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(ResLRUError):
    """Invalid or incomplete experiment configuration."""


class DimensionMismatch(ResLRUError):
    """Operator or state dimensions do not match."""


class LabelAmbiguity(ResLRUError):
    """Dressed-state labeling is meaningless (overlap below floor)."""


class NoCrossingInRange(ResLRUError):
    """The scanned gap curve is monotone; no avoided crossing bracketed."""


class DegenerateDenominator(ResLRUError):
    """A perturbative denominator is too close to zero to be meaningful."""


class NoConvergence(ResLRUError):
    """Iterative root search failed to converge."""


class OutOfRegime(ResLRUError):
    """Input parameters outside the validity range of the used model."""


class StepFailure(ResLRUError):
    """Adaptive integrator could not meet the error tolerance."""


class TraceDrift(ResLRUError):
    """Density-matrix trace drifted beyond tolerance during integration."""


class PulseTooLong(ResLRUError):
    """Pulse duration exceeds the available time slot."""


class NonPositivePopulation(ResLRUError):
    """Population is non-positive where a decay-time inversion needs a log."""


class NonPositiveCoherence(ResLRUError):
    """Coherence is non-positive where a dephasing-time inversion needs a log."""


class Overdamped(ResLRUError):
    """Effective coupling below kappa/4; no Rabi minimum exists."""


class NoRoot(ResLRUError):
    """Root bracketing failed over the allowed parameter range."""


class NoCandidate(ResLRUError):
    """No landscape point satisfies the selection threshold."""


class BudgetExhausted(ResLRUError):
    """Sample budget smaller than the initial grid."""


class RateOverflow(UserWarning):
    """A composed per-cycle probability exceeded 1 and was clamped."""


class InvalidDistribution(ResLRUError):
    """Population triple is not a valid (sub-)distribution."""


class InvalidRates(ResLRUError):
    """Channel parameters outside the representable range."""


class FitDiverged(ResLRUError):
    """Nonlinear trace fit failed to converge."""


class ZeroSeepage(ResLRUError):
    """Leakage lifetime undefined: the seepage rate vanishes."""
