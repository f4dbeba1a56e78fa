import math

import numpy as np
import pytest

from barrierlab import (
    ModelParams,
    OptionSpec,
    aux_quantities,
    normal_cdf,
    validate,
)
from barrierlab.errors import (
    BarrierAboveSpot,
    BarrierAboveStrike,
    NonPositiveTerm,
    NonPositiveVol,
    ParameterError,
)


def test_example_scenario_validates(params, put_spec):
    assert validate(params, put_spec) == (params, put_spec)


def test_barrier_above_spot():
    with pytest.raises(BarrierAboveSpot):
        ModelParams(spot=1.0, barrier=1.2, rate=0.015, yield_=0.01, vol=0.13)


def test_barrier_above_strike(params):
    with pytest.raises(BarrierAboveStrike):
        validate(params, OptionSpec(kind="put", strike=0.4, term=25.0))


def test_barrier_equal_strike_rejected(params):
    with pytest.raises(BarrierAboveStrike):
        validate(params, OptionSpec(kind="put", strike=0.5, term=25.0))


@pytest.mark.parametrize("vol", [0.0, -0.1])
def test_non_positive_vol(vol):
    with pytest.raises(NonPositiveVol):
        ModelParams(spot=1.0, barrier=0.5, rate=0.015, yield_=0.01, vol=vol)


@pytest.mark.parametrize("term", [0.0, -1.0])
def test_non_positive_term(term):
    with pytest.raises(NonPositiveTerm):
        OptionSpec(kind="put", strike=1.0, term=term)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(spot=0.0, barrier=0.0, rate=0.0, yield_=0.01, vol=0.1),
        dict(spot=-1.0, barrier=0.0, rate=0.0, yield_=0.01, vol=0.1),
        dict(spot=1.0, barrier=-0.2, rate=0.0, yield_=0.01, vol=0.1),
    ],
)
def test_bad_prices(kwargs):
    with pytest.raises(ParameterError):
        ModelParams(**kwargs)


def test_bad_kind():
    with pytest.raises(ParameterError):
        OptionSpec(kind="straddle", strike=1.0, term=1.0)


def test_rate_yield_guard_nudges_and_warns():
    with pytest.warns(RuntimeWarning):
        p = ModelParams(spot=1.0, barrier=0.5, rate=0.015, yield_=0.015, vol=0.13)
    assert abs(p.rate - p.yield_) == pytest.approx(1e-10, rel=1e-6)
    assert math.isfinite(p.theta)


def test_rate_yield_guard_boundary_accepted(recwarn):
    p = ModelParams(spot=1.0, barrier=0.5, rate=0.015, yield_=0.015 - 1e-12, vol=0.13)
    assert not recwarn.list
    assert p.yield_ == 0.015 - 1e-12


def test_theta_example(params, put_spec):
    a = aux_quantities(params, put_spec)
    assert a.theta == pytest.approx(2 * (0.015 - 0.01) / 0.13**2, abs=1e-15)
    assert a.theta == pytest.approx(0.591716, abs=5e-7)


def test_z3_z4_identity(params, put_spec):
    a = aux_quantities(params, put_spec)
    expected = 2 * math.log(params.spot / params.barrier) / (params.vol * math.sqrt(25.0))
    assert a.z3 - a.z4 == pytest.approx(expected, rel=1e-12)


def test_z1_at_the_money(params):
    spec = OptionSpec(kind="call", strike=params.spot, term=25.0)
    a = aux_quantities(params, spec)
    expected = (0.015 - 0.01 + 0.5 * 0.13**2) * 25.0 / (0.13 * math.sqrt(25.0))
    assert a.z1 == pytest.approx(expected, rel=1e-14)


def test_z3_close_to_z4_at_barrier(put_spec):
    p = ModelParams(spot=0.5 * (1 + 1e-12), barrier=0.5, rate=0.015, yield_=0.01, vol=0.13)
    a = aux_quantities(p, put_spec)
    assert abs(a.z3 - a.z4) < 1e-9


def test_z3_above_z4_when_spot_above_barrier(put_spec):
    rng = np.random.default_rng(5)
    for _ in range(50):
        p = ModelParams(
            spot=1.0,
            barrier=float(rng.uniform(0.05, 0.95)),
            rate=float(rng.uniform(-0.02, 0.06)),
            yield_=float(rng.uniform(-0.02, 0.06)),
            vol=float(rng.uniform(0.05, 0.5)),
        )
        a = aux_quantities(p, put_spec)
        assert a.z3 > a.z4


def test_aux_quantities_pure(params, put_spec):
    a1 = aux_quantities(params, put_spec)
    a2 = aux_quantities(params, put_spec)
    assert a1 == a2


# ---------------------------------------------------------------------------
# Normal CDF accuracy


def test_normal_cdf_basics():
    assert normal_cdf(0.0) == 0.5
    assert normal_cdf(40.0) == 1.0
    # reference value from a high-precision erf evaluation (mpmath ncdf)
    assert normal_cdf(1.0) == pytest.approx(0.8413447460685429, abs=1e-16)


def test_normal_cdf_against_high_precision():
    mpmath = pytest.importorskip("mpmath")
    mpmath.mp.dps = 40
    xs = np.concatenate([np.linspace(-8, 8, 161), np.random.default_rng(2).uniform(-8, 8, 200)])
    for x in xs:
        exact = float(mpmath.ncdf(mpmath.mpf(float(x))))
        assert abs(normal_cdf(float(x)) - exact) < 1e-15


def test_normal_cdf_symmetry_and_monotone():
    xs = np.linspace(-8, 8, 401)
    vals = normal_cdf(xs)
    assert np.all(np.abs(vals + normal_cdf(-xs) - 1.0) < 1e-15)
    assert np.all(np.diff(vals) >= 0)
    assert np.all((vals >= 0) & (vals <= 1))


def test_normal_cdf_array_matches_scalar():
    # array path uses scipy's erfc, scalar path libm's; allow one ulp
    xs = np.linspace(-6, 6, 37)
    arr = normal_cdf(xs)
    assert arr.shape == xs.shape
    for i, x in enumerate(xs):
        assert arr[i] == pytest.approx(normal_cdf(float(x)), abs=3e-16)
