"""Synthetic confounded data with a bimodal treated outcome.

X ~ N(1, I_10) and the treatment probability depends on X1 and X6. The
treated outcome carries a +15 shift with probability logistic(0.5 X1),
which makes Y1 | V bimodal.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ccme.estimators.data import Dataset
from ccme.propensity import synthetic_propensity

logger = logging.getLogger(__name__)

BETA = (1.0, -0.5, 0.8, -0.7, 0.6, 1.0, 0.3, -0.2, 0.1, -0.3)
GAMMA = (0.8, 0.0, 0.0, 0.6, 0.0, 2.0, 0.4, 0.0, 0.0, 0.2)
N_COVARIATES = 10
V_DIM = 5
SHIFT = 15.0
TREATED_INTERCEPT = 3.0
CONTROL_INTERCEPT = 1.0


@dataclass
class DgpConfig:
    n: int
    seed: int = 0
    scenario: str = 'a'
    beta: tuple = BETA
    gamma: tuple = GAMMA


@dataclass
class LatentRecord:
    propensity: np.ndarray
    S: np.ndarray
    Y1: np.ndarray
    Y0: np.ndarray


def noise_scale(X):
    """s(X) = 0.5 (1 + 0.5 |X1| + 0.3 |X5|); also accepts V since X5 is in V."""
    X = np.asarray(X, dtype=float)
    return 0.5 * (1.0 + 0.5 * np.abs(X[:, 0]) + 0.3 * np.abs(X[:, 4]))


def shift_probability(x1):
    return expit(0.5 * np.asarray(x1, dtype=float))


def draw_covariates(n, rng):
    return rng.normal(1.0, 1.0, size=(n, N_COVARIATES))


def generate(cfg):
    rng = np.random.default_rng(cfg.seed)
    beta = np.asarray(cfg.beta, dtype=float)
    gamma = np.asarray(cfg.gamma, dtype=float)

    X = draw_covariates(cfg.n, rng)
    pi = synthetic_propensity(X)
    A = (rng.random(cfg.n) < pi).astype(int)
    S = SHIFT * (rng.random(cfg.n) < shift_probability(X[:, 0]))
    scale = noise_scale(X)
    Y1 = TREATED_INTERCEPT + X @ (beta + gamma) + S + rng.normal(0.0, scale)
    # treatment effect set to zero; only treated outcomes reach the estimators
    Y0 = CONTROL_INTERCEPT + X @ beta + rng.normal(0.0, scale)
    Y = np.where(A == 1, Y1, Y0)

    logger.debug('generated %d rows (seed %d): %d treated', cfg.n, cfg.seed, A.sum())
    dataset = Dataset(X, A, Y, v_columns=tuple(range(V_DIM)))
    return dataset, LatentRecord(pi, S, Y1, Y0)
