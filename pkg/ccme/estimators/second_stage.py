"""Stage 2 on D1: regress the pseudo-outcomes on V."""
import logging

import numpy as np

from ccme.errors import DegenerateDataError, InvalidArgumentError
from ccme.estimators.first_stage import NeuralKernelCme
from ccme.estimators.losses import nk_objective, trace_objective
from ccme.estimators.model import DeepFeatureCcme, NeuralKernelCcme, RidgeCcme
from ccme.estimators.pseudo import pseudo_targets
from ccme.kernels import factorize, gram
from ccme.neuralnet import mlp_forward, mlp_init, train_network

logger = logging.getLogger(__name__)


def _stage_inputs(split, first_stage, variant, kernel_y):
    pseudo = pseudo_targets(variant, first_stage, split.d1, kernel_y)
    V = split.d1.V
    if variant == 'onestep':
        V = V[split.d1.treated]
    if len(V) == 0:
        raise DegenerateDataError('no rows for the second stage')
    return pseudo, V


def _common(split, variant, kernel_y, V):
    Y = np.vstack([split.d0.Y, split.d1.Y])
    return dict(variant=variant, kernel_y=kernel_y, y_min=Y.min(axis=0), y_max=Y.max(axis=0),
                d_v=V.shape[1])


def fit_second_stage_rr(split, first_stage, variant, kernel_v, lambda_1, kernel_y):
    pseudo, V = _stage_inputs(split, first_stage, variant, kernel_y)
    if not lambda_1 > 0:
        raise InvalidArgumentError(f'lambda_1 must be positive, got {lambda_1}')

    factor = factorize(gram(kernel_v, V, V), len(V) * lambda_1)
    return RidgeCcme(pseudo=pseudo, V1=V, kernel_v=kernel_v, factor=factor,
                     **_common(split, variant, kernel_y, V))


def fit_second_stage_df(split, first_stage, variant, hidden_layers, n_features, lambda_1,
                        train_config, kernel_y, seed=0):
    pseudo, V = _stage_inputs(split, first_stage, variant, kernel_y)
    n = len(V)
    K_xi = pseudo.target_gram()

    network = mlp_init([V.shape[1], *hidden_layers, n_features], seed)
    result = train_network(network, V, trace_objective(K_xi, lambda_1), train_config, seed=seed,
                           name=f'deep-feature stage 2 ({variant})')

    psi = mlp_forward(result.params, V)[0]
    factor = factorize(psi.T @ psi, n * lambda_1)
    model = DeepFeatureCcme(pseudo=pseudo, network=result.params, psi=psi, factor=factor,
                            **_common(split, variant, kernel_y, V))
    model.diagnostics['stage2_loss'] = result.losses[-1] if result.losses else None
    return model


def check_grid(first_stage, grid):
    cme = getattr(first_stage, 'cme', None)
    if not isinstance(cme, NeuralKernelCme):
        raise InvalidArgumentError('the neural-kernel second stage needs a neural-kernel first stage')
    if cme.grid.shape != grid.shape or not np.array_equal(cme.grid, grid):
        raise InvalidArgumentError('grid mismatch: both neural-kernel stages must share grid points')


def fit_second_stage_nk(split, first_stage, variant, grid, hidden_layers, train_config, kernel_y,
                        seed=0):
    grid = np.asarray(grid, dtype=float).reshape(len(grid), -1)
    if len(np.unique(grid, axis=0)) != len(grid):
        raise InvalidArgumentError('neural-kernel grid points must be distinct')
    if variant in ('dr', 'pi'):
        check_grid(first_stage, grid)

    pseudo, V = _stage_inputs(split, first_stage, variant, kernel_y)
    K_M = gram(kernel_y, grid, grid)
    targets = pseudo.grid_targets(grid)

    network = mlp_init([V.shape[1], *hidden_layers, len(grid)], seed)
    result = train_network(network, V, nk_objective(targets, K_M), train_config, seed=seed,
                           name=f'neural-kernel stage 2 ({variant})')
    model = NeuralKernelCcme(network=result.params, grid=grid, K_M=K_M,
                             **_common(split, variant, kernel_y, V))
    model.diagnostics['stage2_loss'] = result.losses[-1] if result.losses else None
    return model


def fit_one_step(split, method, kernel_y, kernel_v=None, lambda_1=None, hidden_layers=None,
                 n_features=None, grid=None, train_config=None, seed=0, first_stage=None):
    """Treated-only regression of phi(Y) on V over D1; no propensity, no first stage."""
    if method == 'rr':
        return fit_second_stage_rr(split, first_stage, 'onestep', kernel_v, lambda_1, kernel_y)
    if method == 'df':
        return fit_second_stage_df(split, first_stage, 'onestep', hidden_layers, n_features,
                                   lambda_1, train_config, kernel_y, seed=seed)
    if method == 'nk':
        return fit_second_stage_nk(split, first_stage, 'onestep', grid, hidden_layers,
                                   train_config, kernel_y, seed=seed)
    raise InvalidArgumentError(f'unknown method {method!r}')
