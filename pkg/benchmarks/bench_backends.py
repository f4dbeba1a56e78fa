#!/usr/bin/env python3
"""Benchmark the JIT kernels against the pure-numpy fallback.

Runs the three hot kernels on both backends at matched sizes and prints
throughput plus the speedup.  The numpy backend is exercised directly (no
env var needed); agreement of the outputs is checked as a side effect.

Usage: python benchmarks/bench_backends.py [--paths N] [--steps M]
"""
import argparse
import time

import numpy as np

from barrierlab import default_params, default_spec
from barrierlab.hedging import Strategy
from barrierlab.kernels import numba_backend, numpy_backend
from barrierlab.paths import PathConfig, kernel_args


def _time(fn, *args, repeat=3):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=20000)
    ap.add_argument("--steps", type=int, default=2500)
    args = ap.parse_args()

    params = default_params()
    spec = default_spec()
    config = PathConfig(n_steps=args.steps, horizon=spec.term, master_seed=42)
    kargs = kernel_args(params, config)
    n_full = max(64, args.paths // 50)  # full-path kernel stores whole paths

    strat = Strategy("direct_put")
    hedge_tail = (
        spec.term / args.steps, params.rate, params.yield_, params.vol, params.theta,
        params.barrier, spec.strike, spec.term,
        strat.kernel_code(), strat.delta_barrier(params),
        strat.initial_wealth(params, spec), strat.target_code(), 0.0,
    )

    cases = [
        ("terminal_values", (42, 0, args.paths, args.steps, *kargs), args.paths),
        ("simulate_paths", (42, 0, n_full, args.steps, *kargs), n_full),
        ("hedge_stats", (42, 0, args.paths, args.steps, *kargs, *hedge_tail), args.paths),
    ]

    print(f"{args.steps} steps; timings are best of 3")
    print(f"{'kernel':<16} {'paths':>8} {'numba':>10} {'numpy':>10} {'speedup':>8}")
    for name, call_args, n in cases:
        # warm the JIT before timing
        getattr(numba_backend, name)(*call_args[:2], min(64, n), *call_args[3:])
        t_nb, out_nb = _time(getattr(numba_backend, name), *call_args)
        t_np, out_np = _time(getattr(numpy_backend, name), *call_args, repeat=1)
        agree = all(
            np.allclose(a, b, rtol=1e-9, atol=1e-12) for a, b in zip(out_nb, out_np)
        )
        print(f"{name:<16} {n:>8} {t_nb:>9.3f}s {t_np:>9.3f}s {t_np / t_nb:>7.1f}x"
              + ("" if agree else "  MISMATCH"))


if __name__ == "__main__":
    main()
