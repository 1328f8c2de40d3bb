import numpy as np
import pytest

from vexleb.schemas.grid import Grid1D, Grid2D
from vexleb.services.conditions import ConditionService
from vexleb.services.dyadic import DyadicService
from vexleb.services.experiments import ExperimentService
from vexleb.services.norms import NormService
from vexleb.services.operators import OperatorService


@pytest.fixture
def norms():
    return NormService(tol=1e-10)


@pytest.fixture
def operators(norms):
    return OperatorService(norms)


@pytest.fixture
def conditions(norms, operators):
    return ConditionService(norms, operators)


@pytest.fixture
def dyadic():
    return DyadicService(threads=2)


@pytest.fixture
def experiments(norms, operators, conditions):
    return ExperimentService(norms, operators, conditions, threads=2)


@pytest.fixture
def unit_axis():
    return Grid1D(lo=0.0, hi=1.0, n=64)


@pytest.fixture
def unit_square():
    return Grid2D.square(0.0, 1.0, 16)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
