"""Exception types raised across the package."""


class BarrierLabError(Exception):
    """Base class for all package errors."""


class ParameterError(BarrierLabError, ValueError):
    """A model or contract parameter violates its validity invariants."""


class BarrierAboveSpot(ParameterError):
    pass


class BarrierAboveStrike(ParameterError):
    pass


class NonPositiveVol(ParameterError):
    pass


class NonPositiveTerm(ParameterError):
    pass


class RateYieldDegeneracy(ParameterError):
    """Rate and yield too close for the auxiliary exponent to be computed."""


class BStarOutOfRange(ParameterError):
    """Assumed hedging barrier must lie in [0, barrier]."""


class StartBelowBarrier(ParameterError):
    """A notional path must start strictly above the barrier."""


class NoRootInBracket(BarrierLabError):
    """Threshold solver found no sign change over the search bracket."""


class MeasureMismatch(BarrierLabError):
    """Operation requires a risk-neutral path configuration."""


class GridMismatch(BarrierLabError):
    """Hedge grid does not match the contract term."""


class DegenerateDenominator(BarrierLabError):
    """Interim-loss ratio undefined: direct and synthetic call costs coincide."""


class SlopeUndefined(BarrierLabError):
    """Slope regression needs at least two ladder points."""
