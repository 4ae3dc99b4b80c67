import logging
from dataclasses import dataclass

import numpy as np

from ccme.errors import DegenerateDataError, InvalidArgumentError

logger = logging.getLogger(__name__)


@dataclass
class Dataset:
    """Rows of (X, A, Y); ``v_columns`` (zero-based) pick V out of X."""
    X: np.ndarray
    A: np.ndarray
    Y: np.ndarray
    v_columns: tuple = (0, 1, 2, 3, 4)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        if self.X.ndim == 1:
            self.X = self.X.reshape(-1, 1)
        self.A = np.asarray(self.A).astype(int).ravel()
        self.Y = np.asarray(self.Y, dtype=float)
        if self.Y.ndim == 1:
            self.Y = self.Y.reshape(-1, 1)
        self.v_columns = tuple(int(c) for c in self.v_columns)

        n = len(self.X)
        if len(self.A) != n or len(self.Y) != n:
            raise InvalidArgumentError(
                f'row counts differ: X {n}, A {len(self.A)}, Y {len(self.Y)}')
        if not np.isin(self.A, (0, 1)).all():
            raise InvalidArgumentError('treatment must be binary (0/1)')
        if any(c < 0 or c >= self.X.shape[1] for c in self.v_columns):
            raise InvalidArgumentError(f'v_columns {self.v_columns} out of range')

    def __len__(self):
        return len(self.X)

    @property
    def V(self):
        return self.X[:, list(self.v_columns)]

    @property
    def treated(self):
        return np.flatnonzero(self.A == 1)

    def subset(self, rows):
        return Dataset(self.X[rows], self.A[rows], self.Y[rows], self.v_columns)


@dataclass
class SplitDataset:
    d0: Dataset
    d1: Dataset
    treated: np.ndarray

    @property
    def m(self):
        return len(self.treated)

    @property
    def n(self):
        return len(self.d1)


def split_data(dataset, seed):
    """Random halves D0 / D1; with an odd size D0 gets the extra row."""
    n = len(dataset)
    if n < 4:
        raise InvalidArgumentError(f'need at least 4 rows to split, got {n}')

    perm = np.random.default_rng(seed).permutation(n)
    n0 = (n + 1) // 2
    d0 = dataset.subset(np.sort(perm[:n0]))
    d1 = dataset.subset(np.sort(perm[n0:]))
    treated = d0.treated
    if len(treated) == 0:
        raise DegenerateDataError('no treated rows in the first-stage half; cannot fit the outcome model')

    logger.info('split %d rows: |D0| = %d (%d treated), |D1| = %d (%d treated)',
                n, len(d0), len(treated), len(d1), len(d1.treated))
    return SplitDataset(d0, d1, treated)
