"""Path generation: geometric Brownian notional paths and their reflected
observed-price counterparts, with optional skew-normal increments near the
barrier.

Paths are walked in log space.  The observed log-price is the notional
log-price plus the running maximum shortfall below the log-barrier
(the cumulative reflection), so the observed price is pinned at the barrier
exactly when the notional makes a new minimum below it.

Randomness is counter-based: a path is fully determined by
(master_seed, path_index), for any batch split or worker count.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

import numpy as np

from . import kernels
from .errors import ParameterError, StartBelowBarrier
from .params import ModelParams

RISK_NEUTRAL = "risk_neutral"
REAL_WORLD = "real_world"

_EMPTY = np.empty(0)


@dataclass(frozen=True)
class SkewLadder:
    """Near-barrier skew schedule for log-price increments.

    ``zone_edges`` are descending multiples of the barrier; ``alphas[i]`` is
    the skew parameter applied while the observed price sits at or below
    ``zone_edges[i]`` times the barrier (and above the next edge); the last
    alpha keeps applying all the way down to the barrier.  Above the top
    edge the increment is plain normal.
    """

    zone_edges: tuple
    alphas: tuple
    ratio: float = 1.3161

    def __post_init__(self):
        if len(self.zone_edges) != len(self.alphas) or not self.zone_edges:
            raise ParameterError("zone_edges and alphas must have equal, nonzero length")
        if any(e2 >= e1 for e1, e2 in zip(self.zone_edges, self.zone_edges[1:])):
            raise ParameterError("zone_edges must be strictly descending")
        if any(not -1.0 <= a <= 1.0 for a in self.alphas):
            raise ParameterError("alphas must lie in [-1, 1]")

    @classmethod
    def default(cls, base_alpha: float = 0.1, ratio: float = 1.3161,
                cap: float = 0.9, top: float = 1.09, bottom: float = 1.01,
                slice_width: float = 0.01) -> "SkewLadder":
        """Ladder rising geometrically per barrier-fraction slice, capped.

        Defaults: no skew above 1.09b, then 0.1 growing by 1.3161 per 1%-of-b
        slice, capped at 0.9 from 1.01b down to the barrier.
        """
        n = int(round((top - bottom) / slice_width)) + 1
        edges = tuple(round(top - i * slice_width, 10) for i in range(n))
        alphas = tuple(min(cap, base_alpha * ratio**i) for i in range(n))
        return cls(zone_edges=edges, alphas=alphas, ratio=ratio)

    def alpha_for(self, observed: float, barrier: float) -> float:
        """Skew parameter for the zone containing ``observed``."""
        ratio = observed / barrier
        a = 0.0
        for edge, alpha in zip(self.zone_edges, self.alphas):
            if ratio <= edge:
                a = alpha
            else:
                break
        return a

    def kernel_levels(self, barrier: float) -> tuple[np.ndarray, np.ndarray]:
        """Descending log price cuts and alphas in kernel form."""
        levels = np.array([math.log(e * barrier) for e in self.zone_edges])
        return levels, np.asarray(self.alphas, dtype=float)


@dataclass(frozen=True)
class PathConfig:
    """Simulation grid, measure, seed, and optional skew ladder."""

    n_steps: int
    horizon: float
    measure: str = RISK_NEUTRAL
    master_seed: int = 0
    skew_ladder: SkewLadder | None = None

    def __post_init__(self):
        if self.n_steps < 1:
            raise ParameterError(f"n_steps must be >= 1, got {self.n_steps}")
        if not (self.horizon > 0.0):
            raise ParameterError(f"horizon must be positive, got {self.horizon}")
        if self.measure not in (RISK_NEUTRAL, REAL_WORLD):
            raise ParameterError(f"measure must be '{RISK_NEUTRAL}' or '{REAL_WORLD}'")


@dataclass(frozen=True)
class SimulatedPath:
    """One path: uniform time grid, notional and observed prices, and the
    cumulative reflection in log units."""

    times: np.ndarray
    notional: np.ndarray
    observed: np.ndarray
    cum_reflection: np.ndarray
    index: int = 0


def drift_rate(params: ModelParams, config: PathConfig) -> float:
    return params.rate if config.measure == RISK_NEUTRAL else params.drift


def kernel_args(params: ModelParams, config: PathConfig) -> tuple:
    """Positional argument tail shared by all kernels."""
    dt = config.horizon / config.n_steps
    mu = drift_rate(params, config)
    log_b = math.log(params.barrier) if params.barrier > 0.0 else 0.0
    if config.skew_ladder is not None and params.barrier > 0.0:
        levels, alphas = config.skew_ladder.kernel_levels(params.barrier)
        use_skew = True
    else:
        levels, alphas, use_skew = _EMPTY, _EMPTY, False
    return (
        math.log(params.spot),
        (mu - params.yield_ - 0.5 * params.vol**2) * dt,
        params.vol * math.sqrt(dt),
        log_b,
        params.barrier > 0.0,
        use_skew,
        levels,
        alphas,
    )


def time_grid(config: PathConfig) -> np.ndarray:
    return np.linspace(0.0, config.horizon, config.n_steps + 1)


def simulate_notional(params: ModelParams, config: PathConfig, path_index: int) -> np.ndarray:
    """Notional (unreflected) price path for one path index."""
    notional, _, _ = kernels.simulate_paths(
        config.master_seed, path_index, 1, config.n_steps, *kernel_args(params, config)
    )
    return notional[0]


def reflect(notional: np.ndarray, barrier: float) -> tuple[np.ndarray, np.ndarray]:
    """Observed prices and cumulative reflection for a notional path.

    The observed price up-rates the notional by the running maximum
    proportional shortfall below the barrier.
    """
    notional = np.asarray(notional, dtype=float)
    if notional[0] <= barrier:
        raise StartBelowBarrier(
            f"notional path starts at {notional[0]}, not above barrier {barrier}"
        )
    if barrier <= 0.0:
        return notional.copy(), np.zeros_like(notional)
    running_min = np.minimum.accumulate(notional)
    cum_reflection = np.maximum(0.0, np.log(barrier / running_min))
    return notional * np.exp(cum_reflection), cum_reflection


def simulate_batch(params: ModelParams, config: PathConfig, n_paths: int,
                   path_start: int = 0, chunk_size: int = 256) -> Iterator[SimulatedPath]:
    """Stream independent paths one at a time.

    Results depend only on (master_seed, path_index): any chunking or
    parallel split yields the same paths.
    """
    times = time_grid(config)
    args = kernel_args(params, config)
    done = 0
    while done < n_paths:
        m = min(chunk_size, n_paths - done)
        notional, observed, cum_ref = kernels.simulate_paths(
            config.master_seed, path_start + done, m, config.n_steps, *args
        )
        for j in range(m):
            yield SimulatedPath(
                times=times,
                notional=notional[j],
                observed=observed[j],
                cum_reflection=cum_ref[j],
                index=path_start + done + j,
            )
        done += m


def simulate_terminal(params: ModelParams, config: PathConfig, n_paths: int,
                      path_start: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Terminal (notional, observed) prices for a block of paths."""
    log_nt, cum_ref = kernels.terminal_values(
        config.master_seed, path_start, n_paths, config.n_steps, *kernel_args(params, config)
    )
    return np.exp(log_nt), np.exp(log_nt + cum_ref)


def skewed_increment(prev_observed: float, ladder: SkewLadder, barrier: float,
                     draws: tuple[float, float], drift_term: float = 0.0,
                     vol_term: float = 1.0) -> float:
    """One log-return increment with the near-barrier skew mixture applied.

    ``draws`` are two independent standard normals; the second is consumed
    only inside the skew zone.  The mixture is not re-centred: its positive
    mean is the intended buying pressure near the barrier.
    """
    a = ladder.alpha_for(prev_observed, barrier)
    z = draws[0]
    if a != 0.0:
        z = math.sqrt(1.0 - a * a) * z + a * abs(draws[1])
    return drift_term + vol_term * z


def reflected_abm_terminal(master_seed: int, n_paths: int, n_steps: int,
                           horizon: float = 1.0, sigma: float = 1.0) -> np.ndarray:
    """Terminal values of a driftless arithmetic BM reflected at its start.

    Reflection damps the terminal variance from sigma^2*T to
    (1 - 2/pi)*sigma^2*T.
    """
    dt = horizon / n_steps
    x, ell = kernels.terminal_values(
        master_seed, 0, n_paths, n_steps,
        0.0, 0.0, sigma * math.sqrt(dt), 0.0, True, False, _EMPTY, _EMPTY,
    )
    return x + ell


def dump_paths_csv(fileobj, sim_paths: Iterable[SimulatedPath]) -> None:
    """Write paths as CSV rows `path,step,t,notional,observed,cum_reflection`."""
    fileobj.write("path,step,t,notional,observed,cum_reflection\n")
    for p in sim_paths:
        for i, t in enumerate(p.times):
            fileobj.write(
                f"{p.index},{i},{t:.10g},{p.notional[i]:.12g},"
                f"{p.observed[i]:.12g},{p.cum_reflection[i]:.12g}\n"
            )
