"""Command-line surface: every study as a reproducible, config-driven run.

Exit codes: 0 success, 2 parameter validation failure, 3 numerical sanity
assertion failure.  Flags override config-file values, which override the
built-in default scenario.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import closed_form as cf
from . import erm as erm_mod
from . import hedging, io, kernels, mc, paths
from .errors import BarrierLabError, ParameterError
from .params import DEFAULT_SCENARIO, ModelParams, OptionSpec, validate

_DEFAULTS = {
    "spot": DEFAULT_SCENARIO["spot"],
    "barrier": DEFAULT_SCENARIO["barrier"],
    "strike": 1.0,
    "rate": DEFAULT_SCENARIO["rate"],
    "yield": DEFAULT_SCENARIO["yield_"],
    "vol": DEFAULT_SCENARIO["vol"],
    "term": 25.0,
    "drift": DEFAULT_SCENARIO["drift"],
    "paths": 10000,
    "steps": 2500,
    "seed": 0,
    "workers": 1,
    "out": ".",
    "kind": "put",
    "mode": "pricing",
    "strategy": "direct_put",
    "ladder": None,
    "cte": 0.25,
    "bstar": None,
    "skew": False,
    "growth": None,
    "loan": 1.0,
    "assert_slope": False,
    "dump_paths": 0,
    "dump_ledger": False,
}

_FLOAT_KEYS = ("spot", "barrier", "strike", "rate", "yield", "vol", "term",
               "drift", "cte", "bstar", "growth", "loan")
_INT_KEYS = ("paths", "steps", "seed", "workers", "dump_paths")
_BOOL_KEYS = ("skew", "assert_slope", "dump_ledger")


def _add_common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    for name in ("spot", "barrier", "strike", "rate", "yield", "vol", "term", "drift"):
        g.add_argument(f"--{name}", type=float, default=None)
    r = p.add_argument_group("run")
    r.add_argument("--paths", type=int, default=None)
    r.add_argument("--steps", type=int, default=None)
    r.add_argument("--seed", type=int, default=None)
    r.add_argument("--workers", type=int, default=None)
    r.add_argument("--out", type=str, default=None)
    r.add_argument("--config", type=str, default=None, help="key=value config file")
    r.add_argument("--skew", action=argparse.BooleanOptionalAction, default=None,
                   help="apply the near-barrier skew ladder to increments")


def _read_config_file(path: str) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParameterError(f"bad config line (expected key=value): {raw!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val
    return out


def _coerce(key: str, val):
    if isinstance(val, str):
        if key in _FLOAT_KEYS:
            return float(val)
        if key in _INT_KEYS:
            return int(float(val))
        if key in _BOOL_KEYS:
            return val.lower() in ("1", "true", "yes", "on")
    return val


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and flags (flags win)."""
    cfg = dict(_DEFAULTS)
    if getattr(args, "config", None):
        for key, val in _read_config_file(args.config).items():
            if key not in cfg:
                raise ParameterError(f"unknown config key {key!r}")
            cfg[key] = _coerce(key, val)
    for key in cfg:
        flag = getattr(args, key, None)
        if flag is not None:
            cfg[key] = flag
    cfg["command"] = args.command
    return cfg


def _model(cfg: dict) -> ModelParams:
    return ModelParams(spot=cfg["spot"], barrier=cfg["barrier"], rate=cfg["rate"],
                       yield_=cfg["yield"], vol=cfg["vol"], drift=cfg["drift"])


def _spec(cfg: dict, kind: str | None = None) -> OptionSpec:
    return OptionSpec(kind=kind or cfg["kind"], strike=cfg["strike"], term=cfg["term"])


def _ladder(cfg: dict, fallback: list) -> list[int]:
    if cfg.get("ladder"):
        return [int(float(tok)) for tok in str(cfg["ladder"]).split(",")]
    return fallback


def _path_config(cfg: dict, measure: str) -> paths.PathConfig:
    ladder = paths.SkewLadder.default() if cfg["skew"] else None
    return paths.PathConfig(n_steps=cfg["steps"], horizon=cfg["term"], measure=measure,
                            master_seed=cfg["seed"], skew_ladder=ladder)


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _finish(cfg: dict, stem: str, summary: dict, rows=None, header: str = "",
            t0: float = 0.0) -> None:
    out = _out_dir(cfg)
    cfg_hash = io.config_hash(cfg)
    summary = {
        "config_hash": cfg_hash,
        "backend": kernels.active_backend(),
        "elapsed_s": round(time.time() - t0, 3),
        **summary,
    }
    io.write_json(out / f"{stem}.json", summary)
    if rows is not None:
        io.write_rows_csv(out / f"{stem}.csv", header, rows, cfg_hash)
    io.write_meta(out, stem, cfg)
    print(f"wrote {out / stem}.json")


# ---------------------------------------------------------------------------
# Commands


def cmd_price(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    call_spec = _spec(cfg, "call")
    put_spec = _spec(cfg, "put")
    validate(params, call_spec)

    quotes = {
        "call_direct": cf.call_barrier(params, call_spec).value,
        "put_direct": cf.put_barrier(params, put_spec).value,
        "call_synthetic": cf.synthetic_call(params, call_spec).value,
        "put_synthetic": cf.synthetic_put(params, put_spec).value,
        "forward_martingale": cf.forward_martingale(params, call_spec).value,
        "forward_submartingale": cf.forward_submartingale(params, call_spec).value,
        "intervention_value": cf.intervention_value(params, call_spec.term).value,
        "bs_call": cf.bs_call(params, call_spec).value,
        "bs_put": cf.bs_put(params, put_spec).value,
        "delta_call": cf.delta_call_barrier(params, call_spec),
        "delta_put": cf.delta_put_barrier(params, put_spec),
        "net_delta": cf.net_delta(params, call_spec.term),
    }
    residuals = {
        "parity_direct": quotes["call_direct"] - quotes["put_direct"] - quotes["forward_martingale"],
        "parity_synthetic_call": quotes["call_synthetic"] - quotes["put_direct"] - quotes["forward_submartingale"],
        "parity_synthetic_put": quotes["call_direct"] - quotes["put_synthetic"] - quotes["forward_submartingale"],
        "intervention_gap": quotes["forward_martingale"] - quotes["forward_submartingale"] - quotes["intervention_value"],
    }
    if cfg.get("growth") is not None:
        quotes["real_world_forward_gap"] = cf.real_world_forward_gap(params, call_spec, cfg["growth"])

    width = max(len(k) for k in {**quotes, **residuals})
    for k, v in quotes.items():
        print(f"{k:<{width}}  {v:+.6f}")
    print("-" * (width + 12))
    for k, v in residuals.items():
        print(f"{k:<{width}}  {v:+.3e}")

    stem = f"price_{io.timestamp()}"
    rows = [(k, float(v)) for k, v in {**quotes, **residuals}.items()]
    _finish(cfg, stem, {"quotes": quotes, "residuals": residuals},
            rows=rows, header="quantity,value", t0=t0)
    return 0 if max(abs(v) for v in residuals.values()) < 1e-12 else 3


def cmd_mc(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    spec = _spec(cfg)
    config = _path_config(cfg, paths.RISK_NEUTRAL)
    res = mc.mc_price(params, spec, config, cfg["paths"])
    print(f"mc mean {res.mean:.6f} +- {res.std_error:.6f}  "
          f"analytic {res.analytic:.6f}  z {res.z_score:+.2f}")
    stem = f"mc_{io.timestamp()}"
    rows = [(res.n_paths, res.mean, res.std_error, res.analytic, res.z_score)]
    _finish(cfg, stem,
            {"mean": res.mean, "std_error": res.std_error, "analytic": res.analytic,
             "z_score": res.z_score, "n_paths": res.n_paths},
            rows=rows, header="n_paths,mean,std_error,analytic,z_score", t0=t0)
    return 0 if np.isfinite(res.z_score) else 3


def cmd_converge(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    if cfg["mode"] == "pricing":
        spec = _spec(cfg)
        config = _path_config(cfg, paths.RISK_NEUTRAL)
        report = mc.pricing_convergence_study(
            params, spec, _ladder(cfg, [1000, 10000, 100000, 1000000]), config)
    elif cfg["mode"] == "replication":
        spec = _spec(cfg)
        strategy = hedging.Strategy(cfg["strategy"], bstar=cfg.get("bstar"))
        ladder = _ladder(cfg, [250, 2500, 25000])
        skew = paths.SkewLadder.default() if cfg["skew"] else None
        report = hedging.replication_convergence_study(
            strategy, params, spec, cfg["drift"], ladder, cfg["paths"], cfg["seed"],
            skew_ladder=skew)
    else:
        raise ParameterError(f"mode must be pricing or replication, got {cfg['mode']!r}")

    slope = report.fitted_slope
    print(f"{cfg['mode']} convergence: slope "
          f"{'skipped (degenerate)' if slope is None else f'{slope:.3f}'}")
    stem = f"converge_{io.timestamp()}"
    out = _out_dir(cfg)
    io.write_report_csv(out / f"{stem}.csv", report, io.config_hash(cfg))
    _finish(cfg, stem,
            {"fitted_slope": slope, "slope_ci": report.slope_ci,
             "degenerate": report.degenerate, "ladder": report.ladder,
             "stat": report.stat, "meta": report.meta}, t0=t0)
    if cfg["assert_slope"] and not report.degenerate:
        if slope is None or not (-0.6 <= slope <= -0.4):
            print(f"slope assertion failed: {slope}", file=sys.stderr)
            return 3
    return 0


def cmd_hedge(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    spec = _spec(cfg)
    strategy = hedging.Strategy(cfg["strategy"], bstar=cfg.get("bstar"))
    skew = paths.SkewLadder.default() if cfg["skew"] else None
    res = hedging.hedge_study(strategy, params, spec, cfg["drift"], cfg["paths"],
                              cfg["steps"], cfg["seed"], skew_ladder=skew)
    err = res.replication_error
    print(f"{strategy.name}: wealth {res.initial_wealth:.6f}  "
          f"error mean {err.mean():+.2e}  sd {err.std(ddof=1):.2e}")
    stem = f"hedge_{io.timestamp()}"
    rows = zip(range(cfg["paths"]), err, res.min_cash, res.min_value,
               res.terminal_value, res.terminal_spot)
    summary = {
        "strategy": strategy.name,
        "initial_wealth": res.initial_wealth,
        "error_mean": float(err.mean()),
        "error_sd": float(err.std(ddof=1)),
        "min_value_overall": float(res.min_value.min()),
        "min_cash_overall": float(res.min_cash.min()),
    }
    _finish(cfg, stem, summary, rows=rows,
            header="path,replication_error,min_cash,min_value,terminal_value,terminal_spot",
            t0=t0)
    if cfg["dump_ledger"]:
        config = paths.PathConfig(n_steps=cfg["steps"], horizon=spec.term,
                                  measure=paths.REAL_WORLD, master_seed=cfg["seed"],
                                  skew_ladder=skew)
        path = next(paths.simulate_batch(params, config, 1))
        ledger = hedging.run_hedge(strategy, params, spec, path)
        delta = ledger.asset_units.copy()
        delta[-1] = np.nan  # no rebalance at maturity
        lrows = zip([0] * len(path.times), range(len(path.times)), path.times,
                    path.observed, delta, ledger.asset_units, ledger.cash,
                    ledger.portfolio_value)
        io.write_rows_csv(_out_dir(cfg) / f"{stem}_ledger.csv",
                          "path,step,t,S,delta,units,cash,value",
                          lrows, io.config_hash(cfg))
    return 0 if np.isfinite(err).all() else 3


def cmd_ilr(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    spec = _spec(cfg, "call")
    stats = hedging.ilr_study(params, spec, cfg["drift"], cfg["paths"], cfg["cte"],
                              cfg["steps"], cfg["seed"])
    print(f"CTE{int(cfg['cte'] * 100)} of ILR = {stats.cte_value:.3f}  "
          f"frac below -1 = {stats.frac_below_minus_one:.4f}")
    stem = f"ilr_{io.timestamp()}"
    rows = zip(range(cfg["paths"]), stats.ilr_per_path)
    _finish(cfg, stem,
            {"cte_level": stats.cte_level, "cte_value": stats.cte_value,
             "frac_below_minus_one": stats.frac_below_minus_one,
             "saving": stats.saving},
            rows=rows, header="path,ilr", t0=t0)
    return 0 if np.isfinite(stats.cte_value) else 3


def cmd_arb(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    stats = hedging.net_delta_study(params, cfg["term"], cfg["drift"], cfg["paths"],
                                    cfg["steps"], cfg["seed"])
    mult = stats.borrowing_multiple
    med_gain = float(np.median(stats.terminal_gain))
    print(f"terminal gain median {med_gain:.4f} (expected {stats.expected_gain:.4f}); "
          f"borrowing multiple median {np.nanmedian(mult):.1f}")
    stem = f"arb_{io.timestamp()}"
    rows = zip(range(cfg["paths"]), stats.terminal_gain, stats.min_cash, stats.min_value)
    _finish(cfg, stem,
            {"expected_gain": stats.expected_gain, "median_gain": med_gain,
             "gain_sd": float(stats.terminal_gain.std(ddof=1)),
             "median_borrowing_multiple": float(np.nanmedian(mult)),
             "frac_borrowing_over_5x": float(np.nanmean(mult > 5))},
            rows=rows, header="path,terminal_gain,min_cash,min_value", t0=t0)
    return 0 if np.isfinite(med_gain) else 3


def cmd_erm(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    erm = erm_mod.ErmLet(rolled_up_loan=cfg["loan"], term=cfg["term"])
    report = erm_mod.principle_ii_report(params, erm)
    print(f"ermlet pv {report.pv:.6f}  bound_a holds: {report.bound_a_holds}  "
          f"bound_b holds: {report.bound_b_holds}")
    stem = f"erm_{io.timestamp()}"
    rows = [("pv", report.pv), ("bound_a_limit", report.bound_a_limit),
            ("bound_b_limit", report.bound_b_limit), ("parity_limit", report.parity_limit)]
    _finish(cfg, stem, report.to_dict(), rows=rows, header="quantity,value", t0=t0)
    return 0 if report.bound_a_holds else 3


def cmd_thresholds(cfg: dict) -> int:
    t0 = time.time()
    params = _model(cfg)
    spec = _spec(cfg, "put")
    put_th = cf.vol_threshold_put(params, spec)
    call_th = cf.vol_threshold_call(params, spec)
    print(f"put threshold sigma  {put_th:.4f}\ncall threshold sigma {call_th:.4f}")
    stem = f"thresholds_{io.timestamp()}"
    rows = [("put_threshold", put_th), ("call_threshold", call_th)]
    _finish(cfg, stem, {"put_threshold": put_th, "call_threshold": call_th},
            rows=rows, header="quantity,value", t0=t0)
    return 0


_COMMANDS = {
    "price": cmd_price,
    "mc": cmd_mc,
    "converge": cmd_converge,
    "hedge": cmd_hedge,
    "ilr": cmd_ilr,
    "arb": cmd_arb,
    "erm": cmd_erm,
    "thresholds": cmd_thresholds,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="barrierlab",
        description="Pricing, simulation and hedging laboratory for options "
                    "on an asset with a lower reflecting barrier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="closed-form quote table with parity residuals")
    _add_common(p)
    p.add_argument("--growth", type=float, default=None,
                   help="also report the projected-growth forward gap")

    p = sub.add_parser("mc", help="Monte Carlo price vs the closed form")
    _add_common(p)
    p.add_argument("--kind", choices=("call", "put"), default=None)

    p = sub.add_parser("converge", help="convergence study (pricing or replication)")
    _add_common(p)
    p.add_argument("--mode", choices=("pricing", "replication"), default=None)
    p.add_argument("--kind", choices=("call", "put"), default=None)
    p.add_argument("--strategy", choices=hedging.STRATEGY_NAMES, default=None)
    p.add_argument("--bstar", type=float, default=None)
    p.add_argument("--ladder", type=str, default=None,
                   help="comma-separated sizes, e.g. 1e3,1e4,1e5")
    p.add_argument("--assert-slope", action=argparse.BooleanOptionalAction, default=None,
                   help="exit 3 unless the fitted slope lies in [-0.6, -0.4]")

    p = sub.add_parser("hedge", help="replication errors for one strategy")
    _add_common(p)
    p.add_argument("--strategy", choices=hedging.STRATEGY_NAMES, default=None)
    p.add_argument("--bstar", type=float, default=None)
    p.add_argument("--dump-ledger", action=argparse.BooleanOptionalAction, default=None)

    p = sub.add_parser("ilr", help="interim loss ratio of the synthetic call")
    _add_common(p)
    p.add_argument("--cte", type=float, default=None)

    p = sub.add_parser("arb", help="net-delta strategy drawdown study")
    _add_common(p)

    p = sub.add_parser("erm", help="loan cash-flow PV and bound diagnostics")
    _add_common(p)
    p.add_argument("--loan", type=float, default=None)

    p = sub.add_parser("thresholds", help="volatility thresholds for put and call")
    _add_common(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve_config(args)
        if cfg["workers"] != 1:
            kernels.set_workers(cfg["workers"])
        return _COMMANDS[args.command](cfg)
    except ParameterError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except BarrierLabError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
