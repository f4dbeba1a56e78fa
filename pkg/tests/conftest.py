import pytest

from barrierlab import ModelParams, OptionSpec


@pytest.fixture
def params() -> ModelParams:
    """The house-price example scenario used throughout."""
    return ModelParams(spot=1.0, barrier=0.5, rate=0.015, yield_=0.01, vol=0.13, drift=0.03)


@pytest.fixture
def call_spec() -> OptionSpec:
    return OptionSpec(kind="call", strike=1.0, term=25.0)


@pytest.fixture
def put_spec() -> OptionSpec:
    return OptionSpec(kind="put", strike=1.0, term=25.0)
