import numpy as np
import pytest

from ccme import create_run_config
from ccme.estimators import Dataset, SplitDataset
from ccme.propensity import OraclePropensity
from config import TestingConfig


def central_difference(f, x, eps=1e-5):
    """Numerical gradient of scalar ``f`` at array ``x`` (central differences)."""
    x = np.array(x, dtype=float)
    grad = np.zeros_like(x)
    for idx in np.ndindex(x.shape):
        step = np.zeros_like(x)
        step[idx] = eps
        grad[idx] = (f(x + step) - f(x - step)) / (2 * eps)
    return grad


def relative_error(a, b):
    return np.linalg.norm(a - b) / max(np.linalg.norm(a) + np.linalg.norm(b), 1e-12)


def make_split(X0, Y0, X1, A1, Y1, A0=None, v_columns=(0,)):
    X0 = np.asarray(X0, dtype=float).reshape(len(X0), -1)
    X1 = np.asarray(X1, dtype=float).reshape(len(X1), -1)
    A0 = np.ones(len(X0), dtype=int) if A0 is None else A0
    d0 = Dataset(X0, A0, Y0, v_columns=v_columns)
    d1 = Dataset(X1, A1, Y1, v_columns=v_columns)
    return SplitDataset(d0, d1, d0.treated)


def unit_propensity():
    return OraclePropensity(function=lambda X: np.ones(len(X)), tag='one', clip=None)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def numeric_grad():
    return central_difference


@pytest.fixture
def rel_error():
    return relative_error


@pytest.fixture
def testing_config():
    return create_run_config(TestingConfig)


@pytest.fixture
def all_treated_split(rng):
    """Both halves fully treated, 2-d covariates, scalar outcomes."""
    X0, X1 = rng.normal(size=(8, 2)), rng.normal(size=(6, 2))
    Y0, Y1 = rng.normal(size=8), rng.normal(size=6)
    return make_split(X0, Y0, X1, np.ones(6, dtype=int), Y1, v_columns=(0, 1))
