"""Present value of a single-period equity release mortgage cash flow and
the associated valuation-bound diagnostics.

The mortgage pays min(rolled-up loan, house price) at maturity, i.e. the
loan less the embedded no-negative-equity put.  With a reflecting barrier
under the house price the put is priced by the barrier formula, and the
classic prepaid-forward upper bound loses its justification: the bound rests
on the standard put lower bound, which the barrier model invalidates.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .closed_form import put_barrier
from .params import ModelParams, OptionSpec, validate


@dataclass(frozen=True)
class ErmLet:
    """Single-period mortgage cash flow: rolled-up loan due at ``term`` years."""

    rolled_up_loan: float
    term: float


@dataclass(frozen=True)
class PrincipleIIReport:
    """Diagnostics for the two legs of the loan-value upper bound."""

    pv: float
    bound_a_limit: float  # discounted loan; always an upper bound
    bound_a_holds: bool
    bound_b_limit: float  # prepaid forward price; can fail with a barrier
    bound_b_holds: bool
    parity_limit: float  # the operative limit: discounted loan less the put

    def to_dict(self) -> dict:
        return {
            "pv": self.pv,
            "bound_a": {"limit": self.bound_a_limit, "holds": self.bound_a_holds},
            "bound_b": {"limit": self.bound_b_limit, "holds": self.bound_b_holds},
            "parity_limit": self.parity_limit,
        }


def _nneg_spec(erm: ErmLet) -> OptionSpec:
    return OptionSpec(kind="put", strike=erm.rolled_up_loan, term=erm.term)


def ermlet_pv(params: ModelParams, erm: ErmLet) -> float:
    """Discounted loan less the embedded no-negative-equity put."""
    spec = _nneg_spec(erm)
    validate(params, spec)
    return erm.rolled_up_loan * math.exp(-params.rate * erm.term) - put_barrier(params, spec).value


def principle_ii_report(params: ModelParams, erm: ErmLet) -> PrincipleIIReport:
    """Check the loan PV against both classic upper bounds.

    Bound (a), the discounted loan, holds for any non-negative put price.
    Bound (b), the prepaid forward ``spot * e^{-q*term}``, holds without a
    barrier but can be violated when the strike and spot sit near the barrier
    with the yield above the rate.
    """
    pv = ermlet_pv(params, erm)
    bound_a = erm.rolled_up_loan * math.exp(-params.rate * erm.term)
    bound_b = params.spot * math.exp(-params.yield_ * erm.term)
    return PrincipleIIReport(
        pv=pv,
        bound_a_limit=bound_a,
        bound_a_holds=pv <= bound_a + 1e-12,
        bound_b_limit=bound_b,
        bound_b_holds=pv <= bound_b + 1e-12,
        parity_limit=pv,
    )
