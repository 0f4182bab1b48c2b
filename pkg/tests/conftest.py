from __future__ import annotations

import pytest

import ffdelay as ff
from helpers import block_load, fixture_params, observation_days


@pytest.fixture(scope="session")
def load_120() -> ff.LoadSeries:
    return block_load(120)


@pytest.fixture(scope="session")
def true_params() -> ff.PerformanceParams:
    return fixture_params()


@pytest.fixture(scope="session")
def true_trajectory(load_120, true_params) -> tuple[float, ...]:
    return ff.eval_performance(load_120, true_params, 120)


@pytest.fixture(scope="session")
def clean_observations(true_trajectory) -> ff.ObservationSet:
    days = observation_days(120)
    return ff.ObservationSet(tuple((d, true_trajectory[d]) for d in days))
