"""Analytic prices, deltas, forwards, parity constructions and threshold solvers.

Two families of formulas live here:

* plain Black-Scholes prices/deltas (continuous yield), used as the
  barrier-free reference and as hedging tools in their own right;
* barrier-adjusted prices/deltas for an asset whose observed price is a
  geometric Brownian motion reflected at a lower barrier.

The barrier-adjusted call/put prices are discounted expectations of the
terminal payoff under the risk-neutral measure of the *notional* (unreflected)
price.  Forwards come in two flavours with the same payoff but different
replication costs: the dynamic "martingale" forward assembled from the call
and put deltas, and the cheaper static position `spot*e^{-qT} - strike*e^{-rT}`.
The gap between the two is the discounted expected effect of the barrier
interventions, and is independent of the strike.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr

from .errors import BStarOutOfRange, NoRootInBracket
from .params import ModelParams, OptionSpec, aux_quantities, normal_cdf

_LOG_POW_LIMIT = 700.0  # beyond this the bare power overflows a double


def _pow_phi(ratio: float, exponent: float, phi_arg: float) -> float:
    """ratio**exponent * normal_cdf(phi_arg) without intermediate overflow.

    The power can overflow a double while the CDF factor underflows faster
    (extreme theta); combining the factors in log space keeps the product
    finite.  ratio must be in (0, 1].
    """
    log_pow = exponent * math.log(ratio)
    if log_pow < _LOG_POW_LIMIT:
        return ratio**exponent * normal_cdf(phi_arg)
    return math.exp(log_pow + log_ndtr(phi_arg))


def _pow_phi_diff(ratio: float, exponent: float, hi: float, lo: float) -> float:
    """ratio**exponent * (normal_cdf(hi) - normal_cdf(lo)), hi >= lo, safely."""
    log_pow = exponent * math.log(ratio)
    if log_pow < _LOG_POW_LIMIT:
        return ratio**exponent * (normal_cdf(hi) - normal_cdf(lo))
    l_hi, l_lo = log_ndtr(hi), log_ndtr(lo)
    return math.exp(log_pow + l_hi + math.log1p(-math.exp(l_lo - l_hi)))

__all__ = [
    "PriceQuote",
    "bs_call",
    "bs_put",
    "bs_delta",
    "call_barrier",
    "put_barrier",
    "delta_call_barrier",
    "delta_put_barrier",
    "delta_bstar",
    "forward_submartingale",
    "forward_martingale",
    "intervention_value",
    "synthetic_call",
    "synthetic_put",
    "net_delta",
    "vol_threshold_put",
    "vol_threshold_call",
    "real_world_forward_gap",
]


@dataclass(frozen=True)
class PriceQuote:
    """A price together with how it was constructed."""

    value: float
    construction: str  # direct | synthetic | black_scholes | bstar
    instrument: str  # call | put | forward_martingale | forward_submartingale | intervention_value


# ---------------------------------------------------------------------------
# Black-Scholes reference (barrier ignored)


def _bs_d1(s, k, r, q, sigma, t):
    return (math.log(s / k) + (r - q + 0.5 * sigma * sigma) * t) / (sigma * math.sqrt(t))


def bs_call(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    """Black-Scholes call with continuous yield; the barrier plays no role."""
    s, k, r, q, sigma, t = params.spot, spec.strike, params.rate, params.yield_, params.vol, spec.term
    d1 = _bs_d1(s, k, r, q, sigma, t)
    d2 = d1 - sigma * math.sqrt(t)
    value = s * math.exp(-q * t) * normal_cdf(d1) - k * math.exp(-r * t) * normal_cdf(d2)
    return PriceQuote(value, "black_scholes", "call")


def bs_put(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    s, k, r, q, sigma, t = params.spot, spec.strike, params.rate, params.yield_, params.vol, spec.term
    d1 = _bs_d1(s, k, r, q, sigma, t)
    d2 = d1 - sigma * math.sqrt(t)
    value = k * math.exp(-r * t) * normal_cdf(-d2) - s * math.exp(-q * t) * normal_cdf(-d1)
    return PriceQuote(value, "black_scholes", "put")


def bs_delta(params: ModelParams, spec: OptionSpec) -> float:
    d1 = _bs_d1(params.spot, spec.strike, params.rate, params.yield_, params.vol, spec.term)
    dq = math.exp(-params.yield_ * spec.term)
    if spec.kind == "call":
        return dq * normal_cdf(d1)
    return dq * (normal_cdf(d1) - 1.0)


# ---------------------------------------------------------------------------
# Barrier-adjusted prices


def call_barrier(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    """Call on the reflected price: Black-Scholes plus a positive adjustment."""
    if params.barrier == 0.0:
        return PriceQuote(bs_call(params, spec).value, "direct", "call")
    a = aux_quantities(params, spec)
    s, b, k = params.spot, params.barrier, spec.strike
    dq = math.exp(-params.yield_ * spec.term)
    dr = math.exp(-params.rate * spec.term)
    adj = (
        s * dq * _pow_phi(b / s, 1.0 + a.theta, a.z2)
        - k * dr * _pow_phi(b / k, 1.0 - a.theta, a.z2 - a.theta * a.vol_sqrt_t)
    )
    value = bs_call(params, spec).value + adj / a.theta
    return PriceQuote(value, "direct", "call")


def put_barrier(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    """Put on the reflected price; payoff support is squeezed into [0, K - b]."""
    if params.barrier == 0.0:
        return PriceQuote(bs_put(params, spec).value, "direct", "put")
    a = aux_quantities(params, spec)
    s, b, k = params.spot, params.barrier, spec.strike
    dq = math.exp(-params.yield_ * spec.term)
    dr = math.exp(-params.rate * spec.term)
    main = (
        k * dr * normal_cdf(-a.z1 + a.vol_sqrt_t)
        - s * dq * normal_cdf(-a.z1)
        - b * dr * normal_cdf(-a.z3 + a.vol_sqrt_t)
        + s * dq * normal_cdf(-a.z3)
    )
    adj = (
        b * dr * normal_cdf(-a.z3 + a.vol_sqrt_t)
        - s * dq * _pow_phi_diff(b / s, 1.0 + a.theta, a.z4, a.z2)
        - k * dr * _pow_phi(b / k, 1.0 - a.theta, a.z2 - a.theta * a.vol_sqrt_t)
    )
    return PriceQuote(main + adj / a.theta, "direct", "put")


# ---------------------------------------------------------------------------
# Deltas


def _delta_call_raw(params: ModelParams, spec: OptionSpec, barrier: float) -> float:
    if barrier == 0.0:
        d1 = _bs_d1(params.spot, spec.strike, params.rate, params.yield_, params.vol, spec.term)
        return math.exp(-params.yield_ * spec.term) * normal_cdf(d1)
    a = aux_quantities(params.with_barrier(barrier), spec)
    return math.exp(-params.yield_ * spec.term) * (
        normal_cdf(a.z1) - _pow_phi(barrier / params.spot, 1.0 + a.theta, a.z2)
    )


def _delta_put_raw(params: ModelParams, spec: OptionSpec, barrier: float) -> float:
    if barrier == 0.0:
        d1 = _bs_d1(params.spot, spec.strike, params.rate, params.yield_, params.vol, spec.term)
        return math.exp(-params.yield_ * spec.term) * (normal_cdf(d1) - 1.0)
    a = aux_quantities(params.with_barrier(barrier), spec)
    return math.exp(-params.yield_ * spec.term) * (
        normal_cdf(a.z1)
        - normal_cdf(a.z3)
        + _pow_phi_diff(barrier / params.spot, 1.0 + a.theta, a.z4, a.z2)
    )


def delta_call_barrier(params: ModelParams, spec: OptionSpec) -> float:
    """Spot delta of the barrier call; tends to zero as spot approaches the barrier."""
    return _delta_call_raw(params, spec, params.barrier)


def delta_put_barrier(params: ModelParams, spec: OptionSpec) -> float:
    return _delta_put_raw(params, spec, params.barrier)


def delta_bstar(params: ModelParams, spec: OptionSpec, bstar: float) -> float:
    """Delta computed as if the barrier were at ``bstar`` in [0, barrier].

    bstar = 0 reproduces the Black-Scholes delta, bstar = barrier the
    barrier-model delta; anything in between also replicates, at a cost
    decreasing in bstar.
    """
    if bstar < 0.0 or bstar > params.barrier:
        raise BStarOutOfRange(f"bstar {bstar} outside [0, {params.barrier}]")
    if spec.kind == "call":
        return _delta_call_raw(params, spec, bstar)
    return _delta_put_raw(params, spec, bstar)


# ---------------------------------------------------------------------------
# Forwards, parity constructions, intervention value


def forward_submartingale(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    """Static replication cost of the forward: spot*e^{-qT} - strike*e^{-rT}."""
    value = params.spot * math.exp(-params.yield_ * spec.term) - spec.strike * math.exp(
        -params.rate * spec.term
    )
    return PriceQuote(value, "direct", "forward_submartingale")


def forward_martingale(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    """Dynamic (delta-traded) replication cost of the forward payoff."""
    if params.barrier == 0.0:
        return PriceQuote(forward_submartingale(params, spec).value, "direct", "forward_martingale")
    a = aux_quantities(params, spec)
    s, b, k = params.spot, params.barrier, spec.strike
    dq = math.exp(-params.yield_ * spec.term)
    dr = math.exp(-params.rate * spec.term)
    value = (
        s * dq * normal_cdf(a.z3)
        - k * dr
        + b * dr * (1.0 - 1.0 / a.theta) * normal_cdf(-a.z3 + a.vol_sqrt_t)
        + (1.0 / a.theta) * s * dq * _pow_phi(b / s, 1.0 + a.theta, a.z4)
    )
    return PriceQuote(value, "direct", "forward_martingale")


def intervention_value(params: ModelParams, term: float) -> PriceQuote:
    """Gap between dynamic and static forward costs; strike-independent.

    This is the discounted expected effect of the barrier interventions on
    the terminal price over the term.
    """
    if params.barrier == 0.0:
        return PriceQuote(0.0, "direct", "intervention_value")
    spec = OptionSpec(kind="call", strike=params.spot, term=term)  # any strike > b works
    a = aux_quantities(params, spec)
    s, b = params.spot, params.barrier
    dq = math.exp(-params.yield_ * term)
    dr = math.exp(-params.rate * term)
    value = (
        b * dr * (1.0 - 1.0 / a.theta) * normal_cdf(-a.z3 + a.vol_sqrt_t)
        - s * dq * normal_cdf(-a.z3)
        + (1.0 / a.theta) * s * dq * _pow_phi(b / s, 1.0 + a.theta, a.z4)
    )
    return PriceQuote(value, "direct", "intervention_value")


def synthetic_call(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    """Call replicated as static forward plus directly-hedged put.

    Cheaper than the direct call whenever the barrier is active; the value
    can be negative for far out-of-the-money strikes, which is the
    replication cost, not an offered price.
    """
    value = forward_submartingale(params, spec).value + put_barrier(params, spec).value
    return PriceQuote(value, "synthetic", "call")


def synthetic_put(params: ModelParams, spec: OptionSpec) -> PriceQuote:
    """Put replicated as directly-hedged call minus static forward."""
    value = call_barrier(params, spec).value - forward_submartingale(params, spec).value
    return PriceQuote(value, "synthetic", "put")


def net_delta(params: ModelParams, term: float) -> float:
    """Long-only position extracting the intervention value from zero wealth.

    Equals minus the spot-derivative of the intervention value; rises to
    e^{-q*term} at the barrier and vanishes far above it.
    """
    if params.barrier == 0.0:
        return 0.0
    spec = OptionSpec(kind="call", strike=params.spot, term=term)
    a = aux_quantities(params, spec)
    return math.exp(-params.yield_ * term) * (
        1.0 - normal_cdf(a.z3) + _pow_phi(params.barrier / params.spot, 1.0 + a.theta, a.z4)
    )


# ---------------------------------------------------------------------------
# Volatility thresholds and the real-world comparison

_BRACKET = (0.01, 2.0)
_SCAN_POINTS = 200


def _smallest_root(fn, lo: float, hi: float, tol: float) -> float:
    """Smallest sign change of fn on [lo, hi], refined by bisection."""
    grid = np.linspace(lo, hi, _SCAN_POINTS)
    vals = [fn(x) for x in grid]
    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            return float(grid[i])
        if vals[i] * vals[i + 1] < 0.0:
            a, c = float(grid[i]), float(grid[i + 1])
            fa = vals[i]
            while c - a > tol:
                m = 0.5 * (a + c)
                fm = fn(m)
                if fm == 0.0:
                    return m
                if fa * fm < 0.0:
                    c = m
                else:
                    a, fa = m, fm
            return 0.5 * (a + c)
    raise NoRootInBracket(f"no sign change over sigma in [{lo}, {hi}]")


def vol_threshold_put(params: ModelParams, spec: OptionSpec, tol: float = 1e-6) -> float:
    """Smallest volatility at which the synthetic put cost reaches its payoff cap K - b.

    Above the threshold, writing the put at the synthetic price is an
    immediate arbitrage: the premium exceeds any possible payoff.
    """
    cap = spec.strike - params.barrier

    def gap(sigma):
        return synthetic_put(params.with_vol(sigma), spec).value - cap

    return _smallest_root(gap, *_BRACKET, tol=tol)


def vol_threshold_call(params: ModelParams, spec: OptionSpec, tol: float = 1e-6) -> float:
    """Smallest volatility at which the direct call cost reaches the spot price."""

    def gap(sigma):
        return call_barrier(params.with_vol(sigma), spec).value - params.spot

    return _smallest_root(gap, *_BRACKET, tol=tol)


def real_world_forward_gap(params: ModelParams, spec: OptionSpec, growth: float) -> float:
    """Discounted gap between a projected-growth forward and the no-arbitrage forward.

    Valuing options off a projected price path spot*e^{g*T} implicitly prices
    the forward at spot*e^{g*T}; the discounted excess over the no-arbitrage
    forward price is a static arbitrage, returned here.
    """
    s, t = params.spot, spec.term
    return s * math.exp((growth - params.rate) * t) - s * math.exp(-params.yield_ * t)


# ---------------------------------------------------------------------------
# Vectorised interim values (used by the hedging module and property tests)


def _aux_arrays(s, tau, b, k, r, q, sigma):
    vst = sigma * np.sqrt(tau)
    c = (r - q + 0.5 * sigma * sigma) * tau
    z1 = (np.log(s / k) + c) / vst
    z2 = (np.log(b * b / (k * s)) + c) / vst
    z3 = (np.log(s / b) + c) / vst
    z4 = (np.log(b / s) + c) / vst
    return z1, z2, z3, z4, vst


def call_barrier_values(params: ModelParams, spec: OptionSpec, s, tau):
    """Barrier call price evaluated elementwise at spots ``s`` and residual terms ``tau``."""
    b, k, r, q, sigma = params.barrier, spec.strike, params.rate, params.yield_, params.vol
    s = np.asarray(s, dtype=float)
    tau = np.asarray(tau, dtype=float)
    dq = np.exp(-q * tau)
    dr = np.exp(-r * tau)
    if b == 0.0:
        z1, _, _, _, vst = _aux_arrays(s, tau, 1.0, k, r, q, sigma)
        return s * dq * normal_cdf(z1) - k * dr * normal_cdf(z1 - vst)
    th = params.theta
    z1, z2, z3, z4, vst = _aux_arrays(s, tau, b, k, r, q, sigma)
    bs = s * dq * normal_cdf(z1) - k * dr * normal_cdf(z1 - vst)
    adj = s * dq * (b / s) ** (1.0 + th) * normal_cdf(z2) - k * dr * (b / k) ** (
        1.0 - th
    ) * normal_cdf(z2 - th * vst)
    return bs + adj / th


def put_barrier_values(params: ModelParams, spec: OptionSpec, s, tau):
    """Barrier put price evaluated elementwise at spots ``s`` and residual terms ``tau``."""
    b, k, r, q, sigma = params.barrier, spec.strike, params.rate, params.yield_, params.vol
    s = np.asarray(s, dtype=float)
    tau = np.asarray(tau, dtype=float)
    dq = np.exp(-q * tau)
    dr = np.exp(-r * tau)
    if b == 0.0:
        z1, _, _, _, vst = _aux_arrays(s, tau, 1.0, k, r, q, sigma)
        return k * dr * normal_cdf(-z1 + vst) - s * dq * normal_cdf(-z1)
    th = params.theta
    z1, z2, z3, z4, vst = _aux_arrays(s, tau, b, k, r, q, sigma)
    main = (
        k * dr * normal_cdf(-z1 + vst)
        - s * dq * normal_cdf(-z1)
        - b * dr * normal_cdf(-z3 + vst)
        + s * dq * normal_cdf(-z3)
    )
    adj = (
        b * dr * normal_cdf(-z3 + vst)
        - s * dq * (b / s) ** (1.0 + th) * (normal_cdf(z4) - normal_cdf(z2))
        - k * dr * (b / k) ** (1.0 - th) * normal_cdf(z2 - th * vst)
    )
    return main + adj / th


def intervention_values(params: ModelParams, s, tau):
    """Intervention value evaluated elementwise at spots ``s`` and residual terms ``tau``."""
    b, r, q, sigma = params.barrier, params.rate, params.yield_, params.vol
    s = np.asarray(s, dtype=float)
    tau = np.asarray(tau, dtype=float)
    if b == 0.0:
        return np.zeros(np.broadcast(s, tau).shape)
    th = params.theta
    _, _, z3, z4, vst = _aux_arrays(s, tau, b, 1.0, r, q, sigma)
    dq = np.exp(-q * tau)
    dr = np.exp(-r * tau)
    return (
        b * dr * (1.0 - 1.0 / th) * normal_cdf(-z3 + vst)
        - s * dq * normal_cdf(-z3)
        + (1.0 / th) * s * dq * (b / s) ** (1.0 + th) * normal_cdf(z4)
    )
