"""Stage 1 on D0: the propensity and the treated-outcome mean embedding.

Every first-stage embedding has the form  mu0(x) = sum_j c_j(x) phi(a_j)
over a fixed set of anchor outcomes ``a_j``: the treated outcomes of D0
for ridge regression and deep features, the grid points for the
neural-kernel estimator. ``coefficients(X)`` returns ``c`` as an
(anchors x rows) matrix.
"""
import logging
from dataclasses import dataclass

import numpy as np

from ccme.errors import DegenerateDataError, InvalidArgumentError
from ccme.estimators.losses import nk_objective, trace_objective
from ccme.kernels import KernelSpec, factorize, gram
from ccme.neuralnet import MlpParams, mlp_forward, mlp_init, train_network
from ccme.propensity import (ORACLES, OraclePropensity, PropensityModel, clipped_fraction,
                             fit_forest, fit_logistic)

logger = logging.getLogger(__name__)

# share of clipped propensities above which positivity looks doubtful
OVERLAP_WARNING = 0.05


@dataclass
class RidgeCme:
    X0: np.ndarray
    anchors: np.ndarray
    kernel_x: KernelSpec
    factor: object

    def coefficients(self, X):
        return self.factor.solve(gram(self.kernel_x, self.X0, X))


@dataclass
class DeepFeatureCme:
    network: MlpParams
    anchors: np.ndarray
    psi: np.ndarray
    factor: object

    def features(self, X):
        return mlp_forward(self.network, X)[0]

    def coefficients(self, X):
        return self.psi @ self.factor.solve(self.features(X).T)


@dataclass
class NeuralKernelCme:
    network: MlpParams
    grid: np.ndarray
    K_M: np.ndarray

    @property
    def anchors(self):
        return self.grid

    def grid_coefficients(self, X):
        return mlp_forward(self.network, X)[0]

    def coefficients(self, X):
        return self.grid_coefficients(X).T


@dataclass
class FirstStage:
    propensity: PropensityModel
    cme: object
    columns: tuple

    @property
    def anchors(self):
        return self.cme.anchors

    def coefficients(self, X):
        return self.cme.coefficients(np.asarray(X)[:, list(self.columns)])


def _treated_inputs(split, columns):
    if split.m == 0:
        raise DegenerateDataError('no treated rows in D0: the outcome embedding cannot be fitted')
    columns = tuple(range(split.d0.X.shape[1])) if columns is None else tuple(columns)
    X0 = split.d0.X[split.treated][:, list(columns)]
    Y0 = split.d0.Y[split.treated]
    return X0, Y0, columns


def fit_propensity(X, A, kind='forest', clip=(0.01, 0.99), seed=0, n_trees=100, max_depth=4,
                   steps=2000, lr=0.1, n_jobs=1, oracle='synthetic', max_features='sqrt'):
    if kind == 'forest':
        return fit_forest(X, A, n_trees=n_trees, max_depth=max_depth, seed=seed, clip=clip,
                          n_jobs=n_jobs, max_features=max_features)
    if kind == 'logistic':
        return fit_logistic(X, A, epochs=steps, lr=lr, clip=clip)
    if kind == 'oracle':
        return OraclePropensity(function=ORACLES[oracle], tag=oracle, clip=clip)
    raise InvalidArgumentError(f'unknown propensity model {kind!r}')


def check_overlap(propensity, *blocks):
    """Fraction of clipped predictions; warns when positivity looks violated."""
    X = np.vstack([b for b in blocks if len(b)])
    fraction = clipped_fraction(propensity, X)
    if fraction > OVERLAP_WARNING:
        logger.warning('%.1f%% of propensity predictions sit on a clip bound', 100 * fraction)
    return fraction


def fit_first_stage_rr(split, kernel_x, kernel_y, lambda_0, propensity=None, columns=None):
    X0, Y0, columns = _treated_inputs(split, columns)
    m = len(X0)
    if not lambda_0 > 0:
        raise InvalidArgumentError(f'lambda_0 must be positive, got {lambda_0}')

    factor = factorize(gram(kernel_x, X0, X0), m * lambda_0)
    return FirstStage(propensity, RidgeCme(X0, Y0, kernel_x, factor), columns)


def fit_first_stage_df(split, kernel_y, hidden_layers, n_features, lambda_0, train_config, seed=0,
                       propensity=None, columns=None):
    X0, Y0, columns = _treated_inputs(split, columns)
    m = len(X0)
    if m < n_features:
        logger.warning('deep-feature stage 1 has %d treated rows for %d features', m, n_features)

    network = mlp_init([X0.shape[1], *hidden_layers, n_features], seed)
    K_Y0 = gram(kernel_y, Y0, Y0)
    result = train_network(network, X0, trace_objective(K_Y0, lambda_0), train_config,
                           seed=seed, name='deep-feature stage 1')

    psi = mlp_forward(result.params, X0)[0]
    factor = factorize(psi.T @ psi, m * lambda_0)
    return FirstStage(propensity, DeepFeatureCme(result.params, Y0, psi, factor), columns)


def fit_first_stage_nk(split, kernel_y, grid, hidden_layers, train_config, seed=0, propensity=None,
                       columns=None):
    grid = np.asarray(grid, dtype=float).reshape(len(grid), -1)
    if len(np.unique(grid, axis=0)) != len(grid):
        raise InvalidArgumentError('neural-kernel grid points must be distinct')
    X0, Y0, columns = _treated_inputs(split, columns)

    K_M = gram(kernel_y, grid, grid)
    targets = gram(kernel_y, Y0, grid)
    network = mlp_init([X0.shape[1], *hidden_layers, len(grid)], seed)
    result = train_network(network, X0, nk_objective(targets, K_M), train_config, seed=seed,
                           name='neural-kernel stage 1')
    return FirstStage(propensity, NeuralKernelCme(result.params, grid, K_M), columns)


def make_grid(Y, size, mode='uniform', padding=2.0, seed=0):
    """Outcome anchors for the neural-kernel estimator."""
    Y = np.asarray(Y, dtype=float).reshape(len(Y), -1)
    if mode == 'uniform' and Y.shape[1] == 1:
        return np.linspace(Y.min() - padding, Y.max() + padding, size).reshape(-1, 1)
    if mode == 'uniform':
        logger.warning('uniform grid needs a scalar outcome; sampling %d outcomes instead', size)

    distinct = np.unique(Y, axis=0)
    if len(distinct) < size:
        raise DegenerateDataError(f'only {len(distinct)} distinct outcomes for a {size}-point grid')
    rows = np.random.default_rng(seed).choice(len(distinct), size=size, replace=False)
    return distinct[np.sort(rows)]
