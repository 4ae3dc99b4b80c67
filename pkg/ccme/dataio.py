"""Dataset files: CSV with header x1..xd,a,y (or y1..yk) and a metadata sibling."""
import json
import logging
import re

import numpy as np
import pandas as pd

from ccme.errors import DataFormatError
from ccme.estimators.data import Dataset
from ccme.utils import atomic_write

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


def meta_path(path):
    stem = path[:-4] if path.endswith('.csv') else path
    return f'{stem}.meta.json'


def dataset_frame(dataset):
    frame = pd.DataFrame(dataset.X, columns=[f'x{j + 1}' for j in range(dataset.X.shape[1])])
    frame['a'] = dataset.A
    d_y = dataset.Y.shape[1]
    if d_y == 1:
        frame['y'] = dataset.Y[:, 0]
    else:
        for j in range(d_y):
            frame[f'y{j + 1}'] = dataset.Y[:, j]
    return frame


def write_dataset(dataset, path, meta=None):
    frame = dataset_frame(dataset)
    with atomic_write(path) as handle:
        frame.to_csv(handle, index=False)

    meta = dict(meta or {}, schema_version=SCHEMA_VERSION, n=len(dataset),
                d_x=dataset.X.shape[1], v_columns=[c + 1 for c in dataset.v_columns])
    with atomic_write(meta_path(path)) as handle:
        json.dump(meta, handle, indent=2, sort_keys=True)
        handle.write('\n')
    logger.info('wrote %d rows to %s', len(dataset), path)


def _numbered(columns, prefix):
    found = sorted((int(m.group(1)), c) for c in columns
                   if (m := re.fullmatch(rf'{prefix}(\d+)', c)))
    return [c for _, c in found]


def read_dataset(path, v_columns=None):
    """Parse a dataset CSV; ``v_columns`` are zero-based indices into X."""
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except (OSError, ValueError) as exc:
        raise DataFormatError(f'cannot read dataset {path}: {exc}') from exc

    x_cols = _numbered(frame.columns, 'x')
    y_cols = ['y'] if 'y' in frame.columns else _numbered(frame.columns, 'y')
    if not x_cols or not y_cols or 'a' not in frame.columns:
        raise DataFormatError(f'{path}: expected columns x1..xd, a, y')
    if frame[x_cols + ['a'] + y_cols].isna().any().any():
        raise DataFormatError(f'{path}: missing values')

    try:
        X = frame[x_cols].to_numpy(dtype=float)
        Y = frame[y_cols].to_numpy(dtype=float)
    except ValueError as exc:
        raise DataFormatError(f'{path}: non-numeric values ({exc})') from exc
    A = frame['a'].to_numpy()
    if not np.isin(A, (0, 1)).all():
        raise DataFormatError(f'{path}: column a must hold 0/1 values')

    if v_columns is None:
        v_columns = tuple(range(min(5, X.shape[1])))
    return Dataset(X, A.astype(int), Y, v_columns=v_columns)
