"""Self-financing delta-hedging strategies along simulated paths.

Conventions, uniform across strategies:

* cash accrues at the risk-free rate between grid points;
* asset income compounds the holding by e^{q*dt} over each interval
  (continuous reinvestment into the asset), so a static position in
  e^{-q*(T-t)} units replicates the forward payoff exactly at any step count;
* the position is rebalanced to the strategy's delta at every interior grid
  point, and liquidated against the target payoff at maturity.

Replication error is terminal portfolio value minus the target payoff.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import stats as sps

from . import closed_form, kernels, paths
from .errors import (
    BStarOutOfRange,
    DegenerateDenominator,
    GridMismatch,
    ParameterError,
)
from .kernels import numpy_backend
from .mc import ConvergenceReport, fit_loglog_slope
from .params import ModelParams, OptionSpec, validate

STRATEGY_NAMES = (
    "direct_call",
    "direct_put",
    "synthetic_call",
    "synthetic_put",
    "bs_delta_call",
    "bs_delta_put",
    "bstar_put",
    "forward_static",
    "forward_martingale",
    "net_delta_arb",
)

_CODE = {
    "direct_call": kernels.CODE_CALL,
    "direct_put": kernels.CODE_PUT,
    "synthetic_call": kernels.CODE_SYNTH_CALL,
    "synthetic_put": kernels.CODE_SYNTH_PUT,
    "bs_delta_call": kernels.CODE_CALL,
    "bs_delta_put": kernels.CODE_PUT,
    "bstar_put": kernels.CODE_PUT,
    "forward_static": kernels.CODE_FORWARD_STATIC,
    "forward_martingale": kernels.CODE_FORWARD_MART,
    "net_delta_arb": kernels.CODE_NET_DELTA,
}

_TARGET = {
    "direct_call": kernels.TARGET_CALL,
    "direct_put": kernels.TARGET_PUT,
    "synthetic_call": kernels.TARGET_CALL,
    "synthetic_put": kernels.TARGET_PUT,
    "bs_delta_call": kernels.TARGET_CALL,
    "bs_delta_put": kernels.TARGET_PUT,
    "bstar_put": kernels.TARGET_PUT,
    "forward_static": kernels.TARGET_FORWARD,
    "forward_martingale": kernels.TARGET_FORWARD,
    "net_delta_arb": kernels.TARGET_CONST,
}


@dataclass(frozen=True)
class Strategy:
    """A named delta profile plus its initial-wealth rule.

    ``bstar`` applies only to the ``bstar_put`` strategy: the delta is
    computed as if the barrier were at bstar in [0, barrier], and the initial
    wealth is the put price at that assumed barrier.
    """

    name: str
    bstar: float | None = None

    def __post_init__(self):
        if self.name not in STRATEGY_NAMES:
            raise ParameterError(f"unknown strategy {self.name!r}")
        if (self.name == "bstar_put") != (self.bstar is not None):
            raise ParameterError("bstar must be given exactly for the bstar_put strategy")

    def kernel_code(self) -> int:
        return _CODE[self.name]

    def target_code(self) -> int:
        return _TARGET[self.name]

    def delta_barrier(self, params: ModelParams) -> float:
        """Barrier level plugged into the option delta formulas."""
        if self.name in ("bs_delta_call", "bs_delta_put"):
            return 0.0
        if self.name == "bstar_put":
            if self.bstar < 0.0 or self.bstar > params.barrier:
                raise BStarOutOfRange(f"bstar {self.bstar} outside [0, {params.barrier}]")
            return float(self.bstar)
        return params.barrier

    def initial_wealth(self, params: ModelParams, spec: OptionSpec) -> float:
        cf = closed_form
        if self.name == "direct_call":
            return cf.call_barrier(params, spec).value
        if self.name == "direct_put":
            return cf.put_barrier(params, spec).value
        if self.name == "synthetic_call":
            return cf.synthetic_call(params, spec).value
        if self.name == "synthetic_put":
            return cf.synthetic_put(params, spec).value
        if self.name == "bs_delta_call":
            return cf.bs_call(params, spec).value
        if self.name == "bs_delta_put":
            return cf.bs_put(params, spec).value
        if self.name == "bstar_put":
            self.delta_barrier(params)  # range check
            return cf.put_barrier(params.with_barrier(self.bstar), spec).value
        if self.name == "forward_static":
            return cf.forward_submartingale(params, spec).value
        if self.name == "forward_martingale":
            return cf.forward_martingale(params, spec).value
        return 0.0  # net_delta_arb starts from zero wealth

    def target_const(self, params: ModelParams, spec: OptionSpec) -> float:
        """Terminal target for the constant-payoff strategy, else 0."""
        if self.name == "net_delta_arb":
            iv = closed_form.intervention_value(params, spec.term).value
            return iv * math.exp(params.rate * spec.term)
        return 0.0


@dataclass(frozen=True)
class HedgeLedger:
    """Time series of one replication run on one path."""

    times: np.ndarray
    asset_units: np.ndarray
    cash: np.ndarray
    portfolio_value: np.ndarray
    terminal_payoff_target: float
    replication_error: float


@dataclass(frozen=True)
class HedgeStudyResult:
    """Per-path statistics from hedging many freshly simulated paths."""

    strategy: Strategy
    n_paths: int
    n_steps: int
    drift: float
    initial_wealth: float
    replication_error: np.ndarray
    min_cash: np.ndarray
    min_value: np.ndarray
    min_disc_value: np.ndarray
    terminal_value: np.ndarray
    terminal_spot: np.ndarray


@dataclass(frozen=True)
class ILRStats:
    """Interim loss ratios of the synthetic call strategy."""

    ilr_per_path: np.ndarray
    cte_level: float
    cte_value: float
    frac_below_minus_one: float
    saving: float  # direct-call cost minus synthetic-call cost


@dataclass(frozen=True)
class DrawdownStats:
    """Terminal gains and worst borrowing/value of the net-delta strategy."""

    terminal_gain: np.ndarray
    min_cash: np.ndarray
    min_value: np.ndarray
    expected_gain: float

    @property
    def borrowing_multiple(self) -> np.ndarray:
        """Largest borrowing over the term as a multiple of the path's gain."""
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.terminal_gain > 0, -self.min_cash / self.terminal_gain, np.nan)

    @property
    def value_drawdown_multiple(self) -> np.ndarray:
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.terminal_gain > 0, -self.min_value / self.terminal_gain, np.nan)


def _profile_delta(strategy: Strategy, params: ModelParams, spec: OptionSpec, s, tau):
    """Strategy delta at spots ``s`` (array) and residual term ``tau`` (scalar)."""
    return numpy_backend._delta(
        strategy.kernel_code(), np.asarray(s, dtype=float), tau, spec.strike,
        params.rate, params.yield_, params.vol, params.theta,
        params.barrier, strategy.delta_barrier(params),
    )


def _target_payoffs(strategy: Strategy, params, spec, s_terminal):
    code = strategy.target_code()
    if code == kernels.TARGET_CALL:
        return np.maximum(s_terminal - spec.strike, 0.0)
    if code == kernels.TARGET_PUT:
        return np.maximum(spec.strike - s_terminal, 0.0)
    if code == kernels.TARGET_FORWARD:
        return s_terminal - spec.strike
    return np.full_like(s_terminal, strategy.target_const(params, spec))


def run_hedge_batch(strategy: Strategy, params: ModelParams, spec: OptionSpec,
                    observed: np.ndarray, times: np.ndarray):
    """Hedge many pre-simulated paths at once.

    ``observed`` has shape (n_paths, n_steps+1) on the uniform grid ``times``.
    Returns (units, cash, value) matrices of the same shape plus the vector
    of replication errors.
    """
    observed = np.atleast_2d(np.asarray(observed, dtype=float))
    n_paths, n1 = observed.shape
    n_steps = n1 - 1
    if n_steps < 1 or abs(times[-1] - spec.term) > 1e-9 * max(1.0, spec.term):
        raise GridMismatch(
            f"hedge grid ends at {times[-1]}, contract term is {spec.term}"
        )
    dt = spec.term / n_steps
    gq, gr = math.exp(params.yield_ * dt), math.exp(params.rate * dt)
    w0 = strategy.initial_wealth(params, spec)

    units = np.empty_like(observed)
    cash = np.empty_like(observed)
    value = np.empty_like(observed)
    units[:, 0] = _profile_delta(strategy, params, spec, observed[:, 0], spec.term)
    cash[:, 0] = w0 - units[:, 0] * observed[:, 0]
    value[:, 0] = w0
    for i in range(1, n_steps + 1):
        u = units[:, i - 1] * gq
        c = cash[:, i - 1] * gr
        value[:, i] = u * observed[:, i] + c
        if i < n_steps:
            d = _profile_delta(strategy, params, spec, observed[:, i], spec.term - i * dt)
            c = c + (u - d) * observed[:, i]
            u = d
        units[:, i] = u
        cash[:, i] = c
    targets = _target_payoffs(strategy, params, spec, observed[:, -1])
    return units, cash, value, value[:, -1] - targets


def run_hedge(strategy: Strategy, params: ModelParams, spec: OptionSpec,
              path: paths.SimulatedPath) -> HedgeLedger:
    """Hedge one simulated path and return its full ledger."""
    units, cash, value, err = run_hedge_batch(
        strategy, params, spec, path.observed[None, :], path.times
    )
    target = _target_payoffs(strategy, params, spec, path.observed[-1:])
    return HedgeLedger(
        times=path.times,
        asset_units=units[0],
        cash=cash[0],
        portfolio_value=value[0],
        terminal_payoff_target=float(target[0]),
        replication_error=float(err[0]),
    )


def hedge_study(strategy: Strategy, params: ModelParams, spec: OptionSpec,
                drift: float, n_paths: int, n_steps: int, master_seed: int = 0,
                path_start: int = 0, skew_ladder: paths.SkewLadder | None = None
                ) -> HedgeStudyResult:
    """Hedge ``n_paths`` freshly generated paths with the fused kernel.

    ``drift`` is the simulated real-world total return; pass ``params.rate``
    to hedge along risk-neutral paths.
    """
    validate(params, spec)
    config = paths.PathConfig(
        n_steps=n_steps, horizon=spec.term, measure=paths.REAL_WORLD,
        master_seed=master_seed, skew_ladder=skew_ladder,
    )
    sim_params = params if params.drift == drift else replace(params, drift=drift)
    w0 = strategy.initial_wealth(params, spec)
    out = kernels.hedge_stats(
        config.master_seed, path_start, n_paths, n_steps,
        *paths.kernel_args(sim_params, config),
        spec.term / n_steps, params.rate, params.yield_, params.vol, params.theta,
        params.barrier, spec.strike, spec.term,
        strategy.kernel_code(), strategy.delta_barrier(params), w0,
        strategy.target_code(), strategy.target_const(params, spec),
    )
    err, min_cash, min_value, min_disc_value, v_t, s_t = out
    return HedgeStudyResult(
        strategy=strategy, n_paths=n_paths, n_steps=n_steps, drift=drift,
        initial_wealth=w0, replication_error=err, min_cash=min_cash,
        min_value=min_value, min_disc_value=min_disc_value,
        terminal_value=v_t, terminal_spot=s_t,
    )


_DEGENERATE_FLOOR = 1e-10


def replication_convergence_study(strategy: Strategy, params: ModelParams,
                                  spec: OptionSpec, drift: float, ladder,
                                  n_paths: int, master_seed: int = 0,
                                  skew_ladder: paths.SkewLadder | None = None
                                  ) -> ConvergenceReport:
    """SD of replication error across a time-step ladder, with log-log slope.

    Strategies that replicate exactly at any step count (the static forward)
    produce errors at rounding level; the slope fit is then skipped and the
    report flagged degenerate.
    """
    ladder = tuple(int(n) for n in ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise ParameterError("ladder must be strictly increasing")
    stat, lo, hi = [], [], []
    for n_steps in ladder:
        res = hedge_study(strategy, params, spec, drift, n_paths, n_steps,
                          master_seed, skew_ladder=skew_ladder)
        sd = float(res.replication_error.std(ddof=1))
        stat.append(sd)
        # chi-square interval for a standard deviation
        chi_lo, chi_hi = sps.chi2.ppf([0.975, 0.025], n_paths - 1)
        lo.append(sd * math.sqrt((n_paths - 1) / chi_lo))
        hi.append(sd * math.sqrt((n_paths - 1) / chi_hi))
    scale = params.spot + spec.strike
    degenerate = max(stat) < _DEGENERATE_FLOOR * scale
    if degenerate or len(ladder) < 2:
        slope, ci = None, None
    else:
        slope, ci = fit_loglog_slope(ladder, stat)
    return ConvergenceReport(
        ladder=ladder, stat=tuple(stat), stat_lo=tuple(lo), stat_hi=tuple(hi),
        fitted_slope=slope, slope_ci=ci, degenerate=degenerate,
        label="replication",
        meta={
            "strategy": strategy.name,
            "n_paths": n_paths,
            "drift": drift,
            "master_seed": master_seed,
            "stat": "replication_error_sd",
            "skew": skew_ladder is not None,
        },
    )


def ilr_study(params: ModelParams, spec: OptionSpec, drift: float, n_paths: int,
              cte_level: float = 0.25, n_steps: int = 2500, master_seed: int = 0
              ) -> ILRStats:
    """Interim loss ratio of the synthetic call: worst discounted portfolio
    value over the term relative to the rolled-up initial saving.

    The conditional tail expectation averages the worst ``cte_level``
    fraction of per-path ratios.
    """
    saving = (
        closed_form.call_barrier(params, spec).value
        - closed_form.synthetic_call(params, spec).value
    )
    if saving < 1e-12:
        raise DegenerateDenominator(
            "direct and synthetic call costs coincide (no barrier effect)"
        )
    res = hedge_study(Strategy("synthetic_call"), params, spec, drift,
                      n_paths, n_steps, master_seed)
    ilr = res.min_disc_value / saving
    k = max(1, int(round(cte_level * n_paths)))
    worst = np.sort(ilr)[:k]
    return ILRStats(
        ilr_per_path=ilr,
        cte_level=cte_level,
        cte_value=float(worst.mean()),
        frac_below_minus_one=float(np.mean(ilr < -1.0)),
        saving=saving,
    )


def net_delta_study(params: ModelParams, term: float, drift: float, n_paths: int,
                    n_steps: int, master_seed: int = 0) -> DrawdownStats:
    """Run the zero-wealth net-delta strategy and collect drawdown statistics.

    The terminal gain concentrates at the intervention value rolled up at the
    risk-free rate; borrowing along the way can be a large multiple of it.
    """
    spec = OptionSpec(kind="call", strike=params.spot, term=term)  # strike unused
    strategy = Strategy("net_delta_arb")
    res = hedge_study(strategy, params, spec, drift, n_paths, n_steps, master_seed)
    return DrawdownStats(
        terminal_gain=res.terminal_value,
        min_cash=res.min_cash,
        min_value=res.min_value,
        expected_gain=strategy.target_const(params, spec),
    )
