"""Model and contract parameters, auxiliary quantities, and the normal CDF.

All prices are in arbitrary currency units; the usual convention in the
rest of the package is spot-normalised (S = 1), but nothing requires it:
every price formula is homogeneous of degree one in (spot, strike, barrier).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import erfc as _erfc

from .errors import (
    BarrierAboveSpot,
    BarrierAboveStrike,
    NonPositiveTerm,
    NonPositiveVol,
    ParameterError,
    RateYieldDegeneracy,
)

# Below this gap the exponent 2(r - q)/sigma^2 is numerically degenerate and
# the yield is nudged away from the rate (see ModelParams).
RATE_YIELD_GUARD = 1e-12
RATE_YIELD_NUDGE = 1e-10

_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class ModelParams:
    """Market/model inputs.

    spot     current observed price S
    barrier  lower reflecting barrier b, 0 <= b < spot
    rate     continuously-compounded risk-free rate r (per year)
    yield_   continuous asset yield q (per year), the "deferment rate"
    vol      annualised log-volatility of the notional price
    drift    real-world expected total return (per year), only used when
             simulating under the real-world measure
    """

    spot: float
    barrier: float
    rate: float
    yield_: float
    vol: float
    drift: float = 0.03

    def __post_init__(self):
        if not (self.spot > 0.0) or not math.isfinite(self.spot):
            raise ParameterError(f"spot must be positive, got {self.spot}")
        if self.barrier < 0.0 or not math.isfinite(self.barrier):
            raise ParameterError(f"barrier must be >= 0, got {self.barrier}")
        if self.barrier >= self.spot:
            raise BarrierAboveSpot(
                f"barrier {self.barrier} must lie strictly below spot {self.spot}"
            )
        if not (self.vol > 0.0) or not math.isfinite(self.vol):
            raise NonPositiveVol(f"vol must be positive, got {self.vol}")
        for name in ("rate", "yield_", "drift"):
            if not math.isfinite(getattr(self, name)):
                raise RateYieldDegeneracy(f"{name} must be finite")
        gap = self.rate - self.yield_
        if abs(gap) < RATE_YIELD_GUARD:
            # The pricing formulas stay well behaved for any nonzero gap, so
            # nudge the yield away from the rate rather than fail.
            nudged = (
                self.yield_ + RATE_YIELD_NUDGE
                if self.yield_ > self.rate
                else self.yield_ - RATE_YIELD_NUDGE
            )
            warnings.warn(
                f"rate - yield = {gap:.3e} is inside the degeneracy guard "
                f"({RATE_YIELD_GUARD:.0e}); using yield = {nudged} instead",
                RuntimeWarning,
                stacklevel=2,
            )
            object.__setattr__(self, "yield_", nudged)

    @property
    def theta(self) -> float:
        """Exponent 2(r - q)/sigma^2 entering the barrier adjustments."""
        return 2.0 * (self.rate - self.yield_) / (self.vol * self.vol)

    def with_barrier(self, barrier: float) -> "ModelParams":
        return replace(self, barrier=barrier)

    def with_vol(self, vol: float) -> "ModelParams":
        return replace(self, vol=vol)


@dataclass(frozen=True)
class OptionSpec:
    """European option contract: kind is 'call' or 'put', strike K, term T in years."""

    kind: str
    strike: float
    term: float

    def __post_init__(self):
        if self.kind not in ("call", "put"):
            raise ParameterError(f"kind must be 'call' or 'put', got {self.kind!r}")
        if not (self.strike > 0.0) or not math.isfinite(self.strike):
            raise ParameterError(f"strike must be positive, got {self.strike}")
        if not (self.term > 0.0) or not math.isfinite(self.term):
            raise NonPositiveTerm(f"term must be positive, got {self.term}")


@dataclass(frozen=True)
class AuxQuantities:
    """Standardised arguments shared by every pricing formula."""

    theta: float
    z1: float
    z2: float
    z3: float
    z4: float
    vol_sqrt_t: float


def validate(params: ModelParams, spec: OptionSpec) -> tuple[ModelParams, OptionSpec]:
    """Check the pair invariants and return the pair unchanged.

    Type-level invariants are enforced at construction; this additionally
    requires the barrier to sit strictly below the strike.
    """
    if params.barrier >= spec.strike:
        raise BarrierAboveStrike(
            f"barrier {params.barrier} must lie strictly below strike {spec.strike}"
        )
    return params, spec


def normal_cdf(x):
    """Standard normal CDF via the complementary error function.

    Accepts scalars or arrays; absolute error below 1e-15 for |x| <= 8.
    """
    if np.isscalar(x):
        return 0.5 * math.erfc(-float(x) / _SQRT2)
    return 0.5 * _erfc(-np.asarray(x, dtype=float) / _SQRT2)


def aux_quantities(params: ModelParams, spec: OptionSpec) -> AuxQuantities:
    """Compute theta and the standardised arguments z1..z4.

    Requires a positive barrier; the barrier-free case never needs them.
    """
    if params.barrier <= 0.0:
        raise ParameterError("auxiliary z-arguments require a positive barrier")
    s, b, k = params.spot, params.barrier, spec.strike
    t = spec.term
    vst = params.vol * math.sqrt(t)
    c = (params.rate - params.yield_ + 0.5 * params.vol * params.vol) * t
    return AuxQuantities(
        theta=params.theta,
        z1=(math.log(s / k) + c) / vst,
        z2=(math.log(b * b / (k * s)) + c) / vst,
        z3=(math.log(s / b) + c) / vst,
        z4=(math.log(b / s) + c) / vst,
        vol_sqrt_t=vst,
    )


DEFAULT_SCENARIO = dict(spot=1.0, barrier=0.5, rate=0.015, yield_=0.01, vol=0.13, drift=0.03)
"""Representative NNEG-style parameter set used as the default scenario."""


def default_params() -> ModelParams:
    return ModelParams(**DEFAULT_SCENARIO)


def default_spec(kind: str = "put") -> OptionSpec:
    return OptionSpec(kind=kind, strike=1.0, term=25.0)
