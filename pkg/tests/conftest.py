"""Shared fixtures; the t = 8 optimization run is reused across modules."""

import numpy as np
import pytest

from steklov_lab.functional import FunctionalParams
from steklov_lab.immersion import build_immersion
from steklov_lab.optimize import OptimizerConfig, minimize
from steklov_lab.steklov import BoundaryWeight
from steklov_lab.trig import TrigSeries

T8 = FunctionalParams(s=1.0, t=8.0)


@pytest.fixture(scope="session")
def t8_result():
    start = BoundaryWeight.from_density(TrigSeries.from_cos([1.0, 0.0, 0.2]))
    return minimize(T8, OptimizerConfig(), start)


@pytest.fixture(scope="session")
def t8_immersion(t8_result):
    return build_immersion(t8_result.spectrum)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)
