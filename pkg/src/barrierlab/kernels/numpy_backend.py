"""Pure-numpy kernels, semantically identical to the JIT backend.

Time steps are walked in a Python loop with all paths advanced as vectors,
so memory stays O(n_paths) for the stats kernels.  Used when numba is
unavailable or when BARRIERLAB_BACKEND=numpy is set.
"""
from __future__ import annotations

import numpy as np
from scipy.special import erfc as _erfc

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
from .rng import path_keys, standard_normals

_SQRT2 = np.sqrt(2.0)


def _norm_cdf(x):
    return 0.5 * _erfc(-x / _SQRT2)


def _skew_alpha(skew_levels, skew_alphas, log_obs):
    """Vectorised zone lookup; levels are descending log observed-price cuts."""
    asc = skew_levels[::-1]
    pos = np.searchsorted(asc, log_obs, side="left")
    deepest = skew_levels.size - 1 - pos  # index of the smallest level >= log_obs
    return np.where(deepest >= 0, skew_alphas[np.clip(deepest, 0, None)], 0.0)


def _draw_increments(keys, step, use_skew, skew_levels, skew_alphas, log_obs):
    z = standard_normals(keys, 2 * step)
    if use_skew:
        a = _skew_alpha(skew_levels, skew_alphas, log_obs)
        hot = a != 0.0
        if np.any(hot):
            w = standard_normals(keys[hot], 2 * step + 1)
            ah = a[hot]
            z[hot] = np.sqrt(1.0 - ah * ah) * z[hot] + ah * np.abs(w)
    return z


def terminal_values(master_seed, path_start, n_paths, n_steps, log_s0, drift_dt,
                    vol_sqrt_dt, log_b, has_barrier, use_skew, skew_levels, skew_alphas):
    """Terminal log-notional and cumulative reflection per path."""
    keys = path_keys(master_seed, path_start, n_paths)
    x = np.full(n_paths, log_s0)
    mn = np.full(n_paths, log_s0)
    ell = np.zeros(n_paths)
    for i in range(n_steps):
        z = _draw_increments(keys, i, use_skew, skew_levels, skew_alphas, x + ell)
        x += drift_dt + vol_sqrt_dt * z
        np.minimum(mn, x, out=mn)
        if has_barrier:
            np.maximum(log_b - mn, 0.0, out=ell)
    return x, ell


def simulate_paths(master_seed, path_start, n_paths, n_steps, log_s0, drift_dt,
                   vol_sqrt_dt, log_b, has_barrier, use_skew, skew_levels, skew_alphas):
    """Full notional/observed/cumulative-reflection arrays, shape (n_paths, n_steps+1)."""
    keys = path_keys(master_seed, path_start, n_paths)
    x = np.full(n_paths, log_s0)
    mn = np.full(n_paths, log_s0)
    ell = np.zeros(n_paths)
    notional = np.empty((n_paths, n_steps + 1))
    observed = np.empty((n_paths, n_steps + 1))
    cum_ref = np.empty((n_paths, n_steps + 1))
    notional[:, 0] = np.exp(log_s0)
    observed[:, 0] = np.exp(log_s0)
    cum_ref[:, 0] = 0.0
    for i in range(n_steps):
        z = _draw_increments(keys, i, use_skew, skew_levels, skew_alphas, x + ell)
        x += drift_dt + vol_sqrt_dt * z
        np.minimum(mn, x, out=mn)
        if has_barrier:
            np.maximum(log_b - mn, 0.0, out=ell)
        notional[:, i + 1] = np.exp(x)
        observed[:, i + 1] = np.exp(x + ell)
        cum_ref[:, i + 1] = ell
    return notional, observed, cum_ref


def _delta(code, s, tau, strike, rate, yld, sigma, theta, barrier, delta_b):
    """Vectorised hedge ratio over spots ``s`` at scalar residual term ``tau``."""
    dq = np.exp(-yld * tau)
    if code == CODE_FORWARD_STATIC:
        return np.full_like(s, dq)
    vst = sigma * np.sqrt(tau)
    c = (rate - yld + 0.5 * sigma * sigma) * tau
    if code == CODE_NET_DELTA:
        z3 = (np.log(s / barrier) + c) / vst
        z4 = (np.log(barrier / s) + c) / vst
        pw = (barrier / s) ** (1.0 + theta)
        return dq * (1.0 - _norm_cdf(z3) + pw * _norm_cdf(z4))
    z1 = (np.log(s / strike) + c) / vst
    if delta_b == 0.0:
        dc = dq * _norm_cdf(z1)
        dp = dc - dq
    else:
        z2 = (np.log(delta_b * delta_b / (strike * s)) + c) / vst
        z3 = (np.log(s / delta_b) + c) / vst
        z4 = (np.log(delta_b / s) + c) / vst
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


def hedge_stats(master_seed, path_start, n_paths, n_steps, log_s0, drift_dt,
                vol_sqrt_dt, log_b, has_barrier, use_skew, skew_levels, skew_alphas,
                dt, rate, yld, sigma, theta, barrier, strike, term,
                code, delta_b, w0, target_code, target_const):
    """Self-financing hedge along freshly generated paths; per-path statistics."""
    keys = path_keys(master_seed, path_start, n_paths)
    x = np.full(n_paths, log_s0)
    mn = np.full(n_paths, log_s0)
    ell = np.zeros(n_paths)
    gq = np.exp(yld * dt)
    gr = np.exp(rate * dt)
    disc_step = np.exp(-rate * dt)
    s0 = np.exp(log_s0)
    units = np.full(
        n_paths,
        _delta(code, np.array([s0]), term, strike, rate, yld, sigma, theta, barrier, delta_b)[0],
    )
    cash = w0 - units * s0
    min_cash = cash.copy()
    min_value = np.full(n_paths, w0)
    min_disc_value = np.full(n_paths, w0)
    disc = 1.0
    s = np.full(n_paths, s0)
    v = np.full(n_paths, w0)
    for i in range(1, n_steps + 1):
        z = _draw_increments(keys, i - 1, use_skew, skew_levels, skew_alphas, x + ell)
        x += drift_dt + vol_sqrt_dt * z
        np.minimum(mn, x, out=mn)
        if has_barrier:
            np.maximum(log_b - mn, 0.0, out=ell)
        s = np.exp(x + ell)
        units *= gq
        cash *= gr
        disc *= disc_step
        v = units * s + cash
        if i < n_steps:
            d = _delta(code, s, term - i * dt, strike, rate, yld, sigma, theta, barrier, delta_b)
            cash += (units - d) * s
            units = d
        np.minimum(min_cash, cash, out=min_cash)
        np.minimum(min_value, v, out=min_value)
        np.minimum(min_disc_value, v * disc, out=min_disc_value)
    if target_code == TARGET_CALL:
        target = np.maximum(s - strike, 0.0)
    elif target_code == TARGET_PUT:
        target = np.maximum(strike - s, 0.0)
    elif target_code == TARGET_FORWARD:
        target = s - strike
    else:
        target = target_const
    return v - target, min_cash, min_value, min_disc_value, v, s
