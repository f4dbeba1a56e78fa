"""barrierlab: pricing, simulation and hedging for long-term options on an
asset following geometric Brownian motion with a lower reflecting barrier."""

from .closed_form import (
    PriceQuote,
    bs_call,
    bs_delta,
    bs_put,
    call_barrier,
    delta_bstar,
    delta_call_barrier,
    delta_put_barrier,
    forward_martingale,
    forward_submartingale,
    intervention_value,
    net_delta,
    put_barrier,
    real_world_forward_gap,
    synthetic_call,
    synthetic_put,
    vol_threshold_call,
    vol_threshold_put,
)
from .erm import ErmLet, PrincipleIIReport, ermlet_pv, principle_ii_report
from .hedging import (
    DrawdownStats,
    HedgeLedger,
    ILRStats,
    Strategy,
    hedge_study,
    ilr_study,
    net_delta_study,
    replication_convergence_study,
    run_hedge,
    run_hedge_batch,
)
from .mc import ConvergenceReport, PricingResult, mc_price, pricing_convergence_study
from .params import (
    AuxQuantities,
    ModelParams,
    OptionSpec,
    aux_quantities,
    default_params,
    default_spec,
    normal_cdf,
    validate,
)
from .paths import (
    PathConfig,
    SimulatedPath,
    SkewLadder,
    reflect,
    simulate_batch,
    simulate_notional,
    simulate_terminal,
    skewed_increment,
)

__version__ = "0.1.0"
