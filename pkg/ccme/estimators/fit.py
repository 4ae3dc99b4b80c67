"""The two-stage meta-estimator: split, stage 1 on D0, stage 2 on D1."""
import logging
import time

import numpy as np

from ccme.errors import InvalidArgumentError
from ccme.estimators.data import split_data
from ccme.estimators.first_stage import (FirstStage, check_overlap, fit_first_stage_df,
                                         fit_first_stage_nk, fit_first_stage_rr, fit_propensity,
                                         make_grid)
from ccme.estimators.second_stage import (fit_one_step, fit_second_stage_df, fit_second_stage_nk,
                                          fit_second_stage_rr)
from ccme.kernels import KernelSpec
from ccme.neuralnet import TrainConfig
from ccme.utils import derive_seed

logger = logging.getLogger(__name__)


def train_configs(config, method, n):
    """Stage 1 and stage 2 schedules; the learning rate scales with n."""
    lr = config.learning_rate(method, n)
    return [TrainConfig(lr=lr, epochs=int(epochs), momentum=config.momentum,
                        batch_size=config.batch_size, val_fraction=config.val_fraction,
                        patience=config.patience)
            for epochs in config.epochs(method)]


def resolve_grid(config, split, seed):
    if config.grid_points is not None:
        return np.asarray(config.grid_points, dtype=float).reshape(config.grid_size, -1)
    Y = split.d0.Y if config.grid_mode == 'uniform' else split.d0.Y[split.treated]
    return make_grid(Y, config.grid_size, mode=config.grid_mode, padding=config.grid_padding,
                     seed=seed)


def fit_ccme(dataset, config, seed=None):
    """Fit ``config.method`` with ``config.variant`` on ``dataset``."""
    started = time.perf_counter()
    seed = config.seed if seed is None else seed
    method, variant = config.method, config.variant
    if method not in ('rr', 'df', 'nk'):
        raise InvalidArgumentError(f'unknown method {method!r}')

    split = split_data(dataset, derive_seed(seed, 'split'))
    kernel_x = KernelSpec(config.bandwidth_x)
    kernel_v = KernelSpec(config.bandwidth_v)
    kernel_y = KernelSpec(config.bandwidth_y, normalized=True)
    columns = config.outcome_column_indices(dataset.X.shape[1])
    stage1_train, stage2_train = train_configs(config, method, len(dataset))
    stage1_seed, stage2_seed = derive_seed(seed, 'stage1'), derive_seed(seed, 'stage2')
    diagnostics = {'seed': seed, 'n': len(dataset), 'm': split.m, 'd1_rows': split.n}

    propensity = None
    if variant in ('dr', 'ipw'):
        propensity = fit_propensity(
            split.d0.X, split.d0.A, kind=config.propensity_kind, clip=config.clip,
            seed=derive_seed(seed, 'propensity'), n_trees=config.forest_trees,
            max_depth=config.forest_depth, steps=config.logistic_steps, lr=config.logistic_lr,
            max_features=config.forest_features)
        diagnostics['propensity'] = config.propensity_kind
        diagnostics['overlap_clipped_fraction'] = check_overlap(propensity, split.d0.X, split.d1.X)

    grid = None
    if method == 'nk':
        grid = resolve_grid(config, split, derive_seed(seed, 'grid'))

    first_stage = None
    if variant in ('dr', 'pi'):
        if method == 'rr':
            first_stage = fit_first_stage_rr(split, kernel_x, kernel_y, config.lambda_0,
                                             propensity=propensity, columns=columns)
        elif method == 'df':
            first_stage = fit_first_stage_df(split, kernel_y, config.hidden_layers,
                                             config.grid_size, config.lambda_0, stage1_train,
                                             seed=stage1_seed, propensity=propensity,
                                             columns=columns)
        else:
            first_stage = fit_first_stage_nk(split, kernel_y, grid, config.hidden_layers,
                                             stage1_train, seed=stage1_seed,
                                             propensity=propensity, columns=columns)
    elif variant == 'ipw':
        first_stage = FirstStage(propensity, None, columns)

    if variant == 'onestep':
        model = fit_one_step(split, method, kernel_y, kernel_v=kernel_v, lambda_1=config.lambda_1,
                             hidden_layers=config.hidden_layers, n_features=config.grid_size,
                             grid=grid, train_config=stage2_train, seed=stage2_seed)
    elif method == 'rr':
        model = fit_second_stage_rr(split, first_stage, variant, kernel_v, config.lambda_1, kernel_y)
    elif method == 'df':
        model = fit_second_stage_df(split, first_stage, variant, config.hidden_layers,
                                    config.grid_size, config.lambda_1, stage2_train, kernel_y,
                                    seed=stage2_seed)
    else:
        stage2_grid = grid
        if config.stage2_grid_points is not None:
            stage2_grid = np.asarray(config.stage2_grid_points, dtype=float)
        model = fit_second_stage_nk(split, first_stage, variant, stage2_grid,
                                    config.hidden_layers, stage2_train, kernel_y,
                                    seed=stage2_seed)

    model.diagnostics.update(diagnostics)
    model.diagnostics['seconds'] = time.perf_counter() - started
    logger.info('fitted %s/%s on %d rows in %.2fs', method, variant, len(dataset),
                model.diagnostics['seconds'])
    return model
