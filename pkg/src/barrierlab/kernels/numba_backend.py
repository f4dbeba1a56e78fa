"""JIT-compiled kernels: path generation, terminal sampling, fused hedging.

Each kernel walks paths sequentially in time and paths in parallel; all
randomness comes from the counter-based scheme in :mod:`.rng`, so outputs
depend only on (master_seed, path_index) regardless of thread count.
"""
from __future__ import annotations

import math
import os

os.environ.setdefault("NUMBA_THREADING_LAYER", "workqueue")

import numpy as np
from numba import njit, prange

from .codes import (
    CODE_CALL,
    CODE_FORWARD_MART,
    CODE_FORWARD_STATIC,
    CODE_NET_DELTA,
    CODE_PUT,
    CODE_SYNTH_CALL,
    CODE_SYNTH_PUT,
    TARGET_CALL,
    TARGET_FORWARD,
    TARGET_PUT,
)
from .rng import _A, _B, _C, _D, _E, _F, GOLDEN, _M1, _M2

_SQRT2 = math.sqrt(2.0)
_INV_2_53 = 1.0 / 9007199254740992.0


@njit(cache=True, inline="always")
def _mix64(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@njit(cache=True, inline="always")
def _path_key(master_seed, path_index):
    return _mix64(_mix64(np.uint64(master_seed) + GOLDEN * (np.uint64(path_index) + np.uint64(1))))


@njit(cache=True, inline="always")
def _uniform(key, draw_index):
    bits = _mix64(key + GOLDEN * np.uint64(draw_index))
    return (np.float64(bits >> np.uint64(11)) + 0.5) * _INV_2_53


@njit(cache=True, inline="always")
def _norm_ppf(p):
    q = p - 0.5
    if abs(q) <= 0.425:
        r = 0.180625 - q * q
        num = _A[0] + r * (_A[1] + r * (_A[2] + r * (_A[3] + r * (_A[4] + r * (_A[5] + r * (_A[6] + r * _A[7]))))))
        den = _B[0] + r * (_B[1] + r * (_B[2] + r * (_B[3] + r * (_B[4] + r * (_B[5] + r * (_B[6] + r * _B[7]))))))
        return q * num / den
    if q < 0.0:
        r = p
    else:
        r = 1.0 - p
    r = math.sqrt(-math.log(r))
    if r <= 5.0:
        r = r - 1.6
        num = _C[0] + r * (_C[1] + r * (_C[2] + r * (_C[3] + r * (_C[4] + r * (_C[5] + r * (_C[6] + r * _C[7]))))))
        den = _D[0] + r * (_D[1] + r * (_D[2] + r * (_D[3] + r * (_D[4] + r * (_D[5] + r * (_D[6] + r * _D[7]))))))
    else:
        r = r - 5.0
        num = _E[0] + r * (_E[1] + r * (_E[2] + r * (_E[3] + r * (_E[4] + r * (_E[5] + r * (_E[6] + r * _E[7]))))))
        den = _F[0] + r * (_F[1] + r * (_F[2] + r * (_F[3] + r * (_F[4] + r * (_F[5] + r * (_F[6] + r * _F[7]))))))
    val = num / den
    if q < 0.0:
        return -val
    return val


@njit(cache=True, inline="always")
def _normal(key, draw_index):
    return _norm_ppf(_uniform(key, draw_index))


@njit(cache=True, inline="always")
def _norm_cdf(x):
    return 0.5 * math.erfc(-x / _SQRT2)


@njit(cache=True, inline="always")
def _skew_alpha(skew_levels, skew_alphas, log_obs):
    """Skew parameter for the zone containing the current observed log-price."""
    a = 0.0
    for j in range(skew_levels.size):
        if log_obs <= skew_levels[j]:
            a = skew_alphas[j]
        else:
            break
    return a


@njit(cache=True, inline="always")
def _draw_increment(key, step, use_skew, skew_levels, skew_alphas, log_obs):
    z = _normal(key, 2 * step)
    if use_skew:
        a = _skew_alpha(skew_levels, skew_alphas, log_obs)
        if a != 0.0:
            w = _normal(key, 2 * step + 1)
            return math.sqrt(1.0 - a * a) * z + a * abs(w)
    return z


@njit(cache=True, parallel=True)
def terminal_values(master_seed, path_start, n_paths, n_steps, log_s0, drift_dt,
                    vol_sqrt_dt, log_b, has_barrier, use_skew, skew_levels, skew_alphas):
    """Terminal log-notional and cumulative reflection per path."""
    log_nt = np.empty(n_paths)
    cum_ref = np.empty(n_paths)
    for p in prange(n_paths):
        key = _path_key(master_seed, path_start + p)
        x = log_s0
        mn = log_s0
        ell = 0.0
        for i in range(n_steps):
            z = _draw_increment(key, i, use_skew, skew_levels, skew_alphas, x + ell)
            x = x + drift_dt + vol_sqrt_dt * z
            if x < mn:
                mn = x
                if has_barrier and log_b > mn:
                    ell = log_b - mn
        log_nt[p] = x
        cum_ref[p] = ell
    return log_nt, cum_ref


@njit(cache=True, parallel=True)
def simulate_paths(master_seed, path_start, n_paths, n_steps, log_s0, drift_dt,
                   vol_sqrt_dt, log_b, has_barrier, use_skew, skew_levels, skew_alphas):
    """Full notional/observed/cumulative-reflection arrays, shape (n_paths, n_steps+1)."""
    notional = np.empty((n_paths, n_steps + 1))
    observed = np.empty((n_paths, n_steps + 1))
    cum_ref = np.empty((n_paths, n_steps + 1))
    for p in prange(n_paths):
        key = _path_key(master_seed, path_start + p)
        x = log_s0
        mn = log_s0
        ell = 0.0
        notional[p, 0] = math.exp(log_s0)
        observed[p, 0] = math.exp(log_s0)
        cum_ref[p, 0] = 0.0
        for i in range(n_steps):
            z = _draw_increment(key, i, use_skew, skew_levels, skew_alphas, x + ell)
            x = x + drift_dt + vol_sqrt_dt * z
            if x < mn:
                mn = x
                if has_barrier and log_b > mn:
                    ell = log_b - mn
            notional[p, i + 1] = math.exp(x)
            observed[p, i + 1] = math.exp(x + ell)
            cum_ref[p, i + 1] = ell
    return notional, observed, cum_ref


@njit(cache=True, inline="always")
def _delta(code, s, tau, strike, rate, yld, sigma, theta, barrier, delta_b):
    """Hedge ratio at spot s with residual term tau for one delta profile."""
    dq = math.exp(-yld * tau)
    if code == CODE_FORWARD_STATIC:
        return dq
    vst = sigma * math.sqrt(tau)
    c = (rate - yld + 0.5 * sigma * sigma) * tau
    if code == CODE_NET_DELTA:
        z3 = (math.log(s / barrier) + c) / vst
        z4 = (math.log(barrier / s) + c) / vst
        pw = (barrier / s) ** (1.0 + theta)
        return dq * (1.0 - _norm_cdf(z3) + pw * _norm_cdf(z4))
    z1 = (math.log(s / strike) + c) / vst
    if delta_b == 0.0:
        dc = dq * _norm_cdf(z1)
        dp = dc - dq
    else:
        z2 = (math.log(delta_b * delta_b / (strike * s)) + c) / vst
        z3 = (math.log(s / delta_b) + c) / vst
        z4 = (math.log(delta_b / s) + c) / vst
        pw = (delta_b / s) ** (1.0 + theta)
        dc = dq * (_norm_cdf(z1) - pw * _norm_cdf(z2))
        dp = dq * (_norm_cdf(z1) - _norm_cdf(z3) + pw * (_norm_cdf(z4) - _norm_cdf(z2)))
    if code == CODE_CALL:
        return dc
    if code == CODE_PUT:
        return dp
    if code == CODE_SYNTH_CALL:
        return dq + dp
    if code == CODE_SYNTH_PUT:
        return dc - dq
    return dc - dp  # CODE_FORWARD_MART


@njit(cache=True, parallel=True)
def hedge_stats(master_seed, path_start, n_paths, n_steps, log_s0, drift_dt,
                vol_sqrt_dt, log_b, has_barrier, use_skew, skew_levels, skew_alphas,
                dt, rate, yld, sigma, theta, barrier, strike, term,
                code, delta_b, w0, target_code, target_const):
    """Self-financing hedge along freshly generated paths; per-path statistics.

    Returns (replication_error, min_cash, min_value, min_discounted_value,
    terminal_value, terminal_spot).  Cash grows at the risk-free rate, asset
    income compounds the holding at e^{q*dt}, and the position is rebalanced
    to the profile delta at every interior grid point.
    """
    repl_err = np.empty(n_paths)
    min_cash = np.empty(n_paths)
    min_value = np.empty(n_paths)
    min_disc_value = np.empty(n_paths)
    v_terminal = np.empty(n_paths)
    s_terminal = np.empty(n_paths)
    gq = math.exp(yld * dt)
    gr = math.exp(rate * dt)
    disc_step = math.exp(-rate * dt)
    s0 = math.exp(log_s0)
    for p in prange(n_paths):
        key = _path_key(master_seed, path_start + p)
        x = log_s0
        mn = log_s0
        ell = 0.0
        units = _delta(code, s0, term, strike, rate, yld, sigma, theta, barrier, delta_b)
        cash = w0 - units * s0
        mc = cash
        mv = w0
        mvd = w0
        disc = 1.0
        s = s0
        v = w0
        for i in range(1, n_steps + 1):
            z = _draw_increment(key, i - 1, use_skew, skew_levels, skew_alphas, x + ell)
            x = x + drift_dt + vol_sqrt_dt * z
            if x < mn:
                mn = x
                if has_barrier and log_b > mn:
                    ell = log_b - mn
            s = math.exp(x + ell)
            units = units * gq
            cash = cash * gr
            disc = disc * disc_step
            v = units * s + cash
            if i < n_steps:
                tau = term - i * dt
                d = _delta(code, s, tau, strike, rate, yld, sigma, theta, barrier, delta_b)
                cash = cash + (units - d) * s
                units = d
            if cash < mc:
                mc = cash
            if v < mv:
                mv = v
            vd = v * disc
            if vd < mvd:
                mvd = vd
        if target_code == TARGET_CALL:
            target = max(s - strike, 0.0)
        elif target_code == TARGET_PUT:
            target = max(strike - s, 0.0)
        elif target_code == TARGET_FORWARD:
            target = s - strike
        else:
            target = target_const
        repl_err[p] = v - target
        min_cash[p] = mc
        min_value[p] = mv
        min_disc_value[p] = mvd
        v_terminal[p] = v
        s_terminal[p] = s
    return repl_err, min_cash, min_value, min_disc_value, v_terminal, s_terminal
