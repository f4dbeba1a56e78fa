"""Monte Carlo pricing under the notional risk-neutral measure, with
standard-error reporting and sample-size convergence studies."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as sps

from . import closed_form, paths
from .errors import GridMismatch, MeasureMismatch, SlopeUndefined
from .params import ModelParams, OptionSpec, validate


@dataclass(frozen=True)
class PricingResult:
    """Discounted mean payoff with its standard error and analytic pairing."""

    mean: float
    std_error: float
    n_paths: int
    analytic: float | None = None

    @property
    def z_score(self) -> float | None:
        if self.analytic is None:
            return None
        return (self.mean - self.analytic) / self.std_error


@dataclass(frozen=True)
class ConvergenceReport:
    """Error statistic across a ladder of sizes with a fitted log-log slope.

    ``stat`` holds the per-rung statistic the slope is fitted on; the lo/hi
    columns carry a 95% interval for the underlying error quantity.
    """

    ladder: tuple
    stat: tuple
    stat_lo: tuple
    stat_hi: tuple
    fitted_slope: float | None
    slope_ci: tuple | None
    degenerate: bool = False
    label: str = ""
    meta: dict = field(default_factory=dict)


def _discounted_payoffs(params: ModelParams, spec: OptionSpec, config: paths.PathConfig,
                        n_paths: int, path_start: int = 0) -> np.ndarray:
    if config.measure != paths.RISK_NEUTRAL:
        raise MeasureMismatch("Monte Carlo pricing requires a risk-neutral configuration")
    if abs(config.horizon - spec.term) > 1e-12:
        raise GridMismatch(
            f"config horizon {config.horizon} does not match contract term {spec.term}"
        )
    validate(params, spec)
    _, observed_t = paths.simulate_terminal(params, config, n_paths, path_start)
    disc = math.exp(-params.rate * spec.term)
    if spec.kind == "call":
        return disc * np.maximum(observed_t - spec.strike, 0.0)
    return disc * np.maximum(spec.strike - observed_t, 0.0)


def mc_price(params: ModelParams, spec: OptionSpec, config: paths.PathConfig,
             n_paths: int, path_start: int = 0) -> PricingResult:
    """Discounted mean terminal payoff over reflected paths, paired with the
    closed-form value."""
    pay = _discounted_payoffs(params, spec, config, n_paths, path_start)
    analytic = (
        closed_form.call_barrier(params, spec).value
        if spec.kind == "call"
        else closed_form.put_barrier(params, spec).value
    )
    return PricingResult(
        mean=float(pay.mean()),
        std_error=float(pay.std(ddof=1) / math.sqrt(n_paths)),
        n_paths=n_paths,
        analytic=analytic,
    )


def fit_loglog_slope(sizes, stat) -> tuple[float, tuple[float, float]]:
    """OLS slope of log(stat) on log(size), with a 95% confidence interval."""
    if len(sizes) < 2:
        raise SlopeUndefined("slope regression needs at least two ladder points")
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(stat, dtype=float))
    res = sps.linregress(x, y)
    if len(sizes) > 2:
        half = sps.t.ppf(0.975, len(sizes) - 2) * res.stderr
    else:
        half = 0.0  # two points determine the slope exactly
    return float(res.slope), (float(res.slope - half), float(res.slope + half))


def pricing_convergence_study(params: ModelParams, spec: OptionSpec,
                              ladder, config: paths.PathConfig) -> ConvergenceReport:
    """Pricing-error confidence intervals across a path-count ladder.

    The slope is fitted on the CI half-width (proportional to the standard
    error), the quantity with the clean inverse-square-root law.
    """
    ladder = tuple(int(n) for n in ladder)
    if any(b <= a for a, b in zip(ladder, ladder[1:])):
        raise SlopeUndefined("ladder must be strictly increasing")
    stat, lo, hi = [], [], []
    for n in ladder:
        res = mc_price(params, spec, config, n)
        err = res.mean - res.analytic
        half = 1.96 * res.std_error
        stat.append(half)
        lo.append(err - half)
        hi.append(err + half)
    slope, ci = fit_loglog_slope(ladder, stat)
    return ConvergenceReport(
        ladder=ladder,
        stat=tuple(stat),
        stat_lo=tuple(lo),
        stat_hi=tuple(hi),
        fitted_slope=slope,
        slope_ci=ci,
        label="pricing",
        meta={
            "n_steps": config.n_steps,
            "master_seed": config.master_seed,
            "kind": spec.kind,
            "stat": "ci_half_width",
        },
    )
