"""Pointwise bands of the estimated density at fixed covariate profiles."""
import dataclasses
import logging

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ccme.density import curve_matrix
from ccme.errors import CcmeError, DegenerateDataError, InvalidArgumentError
from ccme.estimators import fit_ccme
from ccme.synthbench.dgp import DgpConfig, generate
from ccme.synthbench.sweep import EVAL_PADDING
from ccme.synthbench.truth import PROFILES, GroundTruth
from ccme.utils import derive_seed

logger = logging.getLogger(__name__)

PROFILE_COLUMNS = ['profile', 'y', 'truth', 'median', 'q05', 'q25', 'q75', 'q95']
QUANTILES = (0.05, 0.25, 0.75, 0.95)


def profile_points(names):
    unknown = [name for name in names if name not in PROFILES]
    if unknown:
        raise InvalidArgumentError(f'unknown profiles {unknown}; choose from {sorted(PROFILES)}')
    return np.array([PROFILES[name] for name in names], dtype=float)


def _run_dataset(run, n, scenario):
    return generate(DgpConfig(n=n, seed=derive_seed(run, n, 'data'), scenario=scenario))[0]


def _profile_run(config, run, n, V, y_grid):
    dataset = _run_dataset(run, n, config.scenario)
    try:
        model = fit_ccme(dataset, config, seed=derive_seed(run, 'profile', config.method))
        return curve_matrix(model, V, y_grid)
    except (CcmeError, np.linalg.LinAlgError) as exc:
        logger.error('profile run %d failed: %s', run, exc)
        return None


def run_profiles(config, runs=None, n=None, names=('v1', 'v2'), n_jobs=None):
    """Median and 50% / 90% bands over ``runs`` fits of ``config.method``/``config.variant``.

    Returns the long table and the number of failed runs.
    """
    runs = tuple(config.seeds if runs is None else runs)
    n = config.n if n is None else n
    n_jobs = config.threads if n_jobs is None else n_jobs
    V = profile_points(names)

    # one grid for every run: the pooled outcome range of all run datasets
    pooled = np.concatenate([_run_dataset(run, n, config.scenario).Y[:, 0] for run in runs])
    y_grid = np.linspace(pooled.min() - EVAL_PADDING, pooled.max() + EVAL_PADDING,
                         config.eval_grid_size)

    run_config = dataclasses.replace(config, n=n)
    curves = Parallel(n_jobs=n_jobs)(
        delayed(_profile_run)(run_config, run, n, V, y_grid) for run in runs)
    done = [c for c in curves if c is not None]
    n_failed = len(curves) - len(done)
    if not done:
        raise DegenerateDataError(f'all {len(curves)} profile runs failed')
    logger.info('profiles: %d runs, %d failed', len(curves), n_failed)

    stack = np.stack(done)  # runs x grid x profiles
    truth = GroundTruth().density(V, y_grid)
    frames = []
    for j, name in enumerate(names):
        values = stack[:, :, j]
        q05, q25, q75, q95 = np.quantile(values, QUANTILES, axis=0)
        frames.append(pd.DataFrame({
            'profile': name, 'y': y_grid, 'truth': truth[:, j],
            'median': np.median(values, axis=0), 'q05': q05, 'q25': q25, 'q75': q75, 'q95': q95,
        }))
    return pd.concat(frames, ignore_index=True)[PROFILE_COLUMNS], n_failed
