"""Monte Carlo sweeps over (method, variant, scenario, n, seed) cells."""
import dataclasses
import itertools
import logging
import time
from dataclasses import dataclass

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ccme.errors import CcmeError, ConfigurationError, DataFormatError
from ccme.estimators import fit_ccme
from ccme.synthbench.dgp import DgpConfig, V_DIM, draw_covariates, generate
from ccme.synthbench.metrics import loglog_slope, mse
from ccme.synthbench.truth import GroundTruth
from ccme.utils import atomic_write, derive_seed

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ['method', 'variant', 'scenario', 'n', 'seed', 'mse', 'seconds', 'status', 'reason']
CELL_KEYS = ('method', 'variant', 'scenario', 'n', 'seed')
EVAL_PADDING = 2.0


@dataclass(frozen=True)
class SweepCell:
    method: str
    variant: str
    scenario: str
    n: int
    seed: int

    @property
    def cell_id(self):
        return f'{self.method}-{self.variant}-{self.scenario}-{self.n}-{self.seed}'


def _matches(cell, filters):
    for key, value in filters.items():
        if key not in CELL_KEYS:
            raise ConfigurationError(f'cannot filter on {key!r}; use one of {", ".join(CELL_KEYS)}')
        if str(getattr(cell, key)).lower() != str(value).lower():
            return False
    return True


def build_cells(config):
    cells = []
    for method, variant, scenario, n, seed in itertools.product(
            config.methods, config.variants, config.scenarios, config.n_list, config.seeds):
        cell = SweepCell(method, variant, scenario, int(n), int(seed))
        if not _matches(cell, config.filters):
            continue
        if method == 'rr' and cell.n > config.rr_max_n:
            logger.info('skipping %s: ridge regression capped at n = %d', cell.cell_id, config.rr_max_n)
            continue
        cells.append(cell)
    return cells


def evaluation_design(config, seed, dataset):
    """Fresh test V from the covariate marginal and the evaluation y grid."""
    rng = np.random.default_rng(derive_seed(seed, 'test'))
    test_v = draw_covariates(config.test_points, rng)[:, :V_DIM]
    Y = dataset.Y[:, 0]
    y_grid = np.linspace(Y.min() - EVAL_PADDING, Y.max() + EVAL_PADDING, config.eval_grid_size)
    return test_v, y_grid


def cell_dataset(cell):
    # keyed on (seed, n) so every method and variant of a cell sees the same data
    return generate(DgpConfig(n=cell.n, seed=derive_seed(cell.seed, cell.n, 'data'),
                              scenario=cell.scenario))[0]


def run_cell(cell, config, truth=None):
    truth = truth or GroundTruth()
    record = dict(method=cell.method, variant=cell.variant, scenario=cell.scenario, n=cell.n,
                  seed=cell.seed, mse=np.nan, seconds=np.nan, status='ok', reason='')
    started = time.perf_counter()
    logger.info('cell %s: start', cell.cell_id)
    try:
        dataset = cell_dataset(cell)
        cell_config = dataclasses.replace(config, method=cell.method, variant=cell.variant,
                                          scenario=cell.scenario, n=cell.n, seed=cell.seed)
        model = fit_ccme(dataset, cell_config, seed=derive_seed(cell.seed, cell.cell_id))
        test_v, y_grid = evaluation_design(config, cell.seed, dataset)
        record['mse'] = mse(model, truth, test_v, y_grid)
    except (CcmeError, np.linalg.LinAlgError) as exc:
        message = exc.format_message() if isinstance(exc, CcmeError) else str(exc)
        logger.error('cell %s failed: %s', cell.cell_id, message)
        record.update(status='failed', reason=message)
    record['seconds'] = time.perf_counter() - started
    if record['status'] == 'ok':
        logger.info('cell %s: mse %.4g in %.1fs', cell.cell_id, record['mse'], record['seconds'])
    return record


def run_sweep(config, cells=None, n_jobs=None):
    cells = build_cells(config) if cells is None else cells
    n_jobs = config.threads if n_jobs is None else n_jobs
    logger.info('sweep: %d cells on %d worker(s)', len(cells), n_jobs)
    records = Parallel(n_jobs=n_jobs)(delayed(run_cell)(cell, config) for cell in cells)
    failed = sum(r['status'] != 'ok' for r in records)
    if failed:
        logger.warning('sweep: %d of %d cells failed', failed, len(records))
    return records


def records_frame(records):
    return pd.DataFrame(records, columns=SWEEP_COLUMNS)


def write_frame(frame, path):
    with atomic_write(path) as handle:
        frame.to_csv(handle, index=False)


def read_sweep(path):
    try:
        frame = pd.read_csv(path, keep_default_na=False, na_values=[''])
    except (OSError, ValueError) as exc:
        raise DataFormatError(f'cannot read sweep results {path}: {exc}') from exc
    missing = [c for c in ('method', 'variant', 'scenario', 'n', 'seed', 'mse') if c not in frame]
    if missing:
        raise DataFormatError(f'{path}: missing columns {", ".join(missing)}')
    if 'status' not in frame:
        frame['status'] = np.where(frame['mse'].notna(), 'ok', 'failed')
    frame['status'] = frame['status'].fillna('failed')
    try:
        frame['n'] = frame['n'].astype(int)
        frame['mse'] = pd.to_numeric(frame['mse'])
    except (TypeError, ValueError) as exc:
        raise DataFormatError(f'{path}: malformed n or mse column ({exc})') from exc
    return frame


def _sem(values):
    if len(values) < 2:
        return np.nan
    return float(np.std(values, ddof=1) / np.sqrt(len(values)))


def summarize(frame):
    """Median MSE per cell, log-log slope per curve and the failed-row count."""
    ok = frame[(frame['status'] == 'ok') & frame['mse'].notna()]
    n_failed = len(frame) - len(ok)
    curve_keys = ['method', 'variant', 'scenario']

    summary = (ok.groupby(curve_keys + ['n'])['mse']
               .agg(median_mse='median', sem=_sem, n_ok='count')
               .reset_index())

    slopes = []
    for key, group in summary.groupby(curve_keys):
        positive = group[group['median_mse'] > 0]
        slope = (loglog_slope(positive['n'], positive['median_mse'])
                 if len(positive) >= 3 else np.nan)
        slopes.append(dict(zip(curve_keys, key), points=len(group), slope=slope))
    slopes = pd.DataFrame(slopes, columns=curve_keys + ['points', 'slope'])
    return summary, slopes, n_failed
