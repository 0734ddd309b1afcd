"""Exception types raised across the package."""


class PCWaveError(Exception):
    """Base class for all errors raised by pcwave."""


class PoleError(PCWaveError, ValueError):
    """A series parameter sits on a pole (non-positive integer denominator)."""


class ConvergenceError(PCWaveError, ArithmeticError):
    """A series or adaptive integrator failed to converge."""


class DomainError(PCWaveError, ValueError):
    """An argument lies outside the region an evaluation strategy supports."""


class BlowupError(PCWaveError, ArithmeticError):
    """A time integration left its physically meaningful range."""


class GridError(PCWaveError, ValueError):
    """A sampled series is too short or not uniformly spaced."""


class GridMismatchError(PCWaveError, ValueError):
    """Two waves that must share a grid do not."""


class DegenerateError(PCWaveError, ArithmeticError):
    """A wave has (numerically) vanishing norm."""


class StabilityError(PCWaveError, ValueError):
    """A time step violates the propagator's stability guards."""


class BoundaryError(PCWaveError, ValueError):
    """A tracked feature lies inside the absorbing edge zone."""


class MissingDataError(PCWaveError, ValueError):
    """A trajectory lacks a column that an analysis requires."""


class ConfigError(PCWaveError, ValueError):
    """A scenario configuration file is malformed or invalid."""
