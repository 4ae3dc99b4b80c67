"""Bootstrap random forest of shallow Gini trees for binary treatment."""
import logging
from dataclasses import dataclass

import numpy as np
from joblib import Parallel, delayed

from ccme.errors import InvalidArgumentError
from ccme.propensity.models import DEFAULT_CLIP, ForestPropensity, OraclePropensity, check_clip

logger = logging.getLogger(__name__)


@dataclass
class TreeNode:
    probability: float
    feature: int = -1
    threshold: float = np.nan
    left: 'TreeNode' = None
    right: 'TreeNode' = None

    @property
    def is_leaf(self):
        return self.left is None

    @property
    def depth(self):
        if self.is_leaf:
            return 0
        return 1 + max(self.left.depth, self.right.depth)

    def predict(self, X):
        out = np.empty(len(X))
        self._fill(X, np.arange(len(X)), out)
        return out

    def _fill(self, X, idx, out):
        if self.is_leaf:
            out[idx] = self.probability
            return
        # values equal to the threshold go right
        goes_left = X[idx, self.feature] < self.threshold
        self.left._fill(X, idx[goes_left], out)
        self.right._fill(X, idx[~goes_left], out)


def _gini(pos, total):
    p = pos / total
    return 2.0 * p * (1.0 - p)


def _best_split(x, y):
    """Best threshold on one feature as (weighted child impurity, threshold)."""
    order = np.argsort(x, kind='stable')
    xs, ys = x[order], y[order]
    n = len(xs)
    # candidate cut before position i, only between distinct values
    cuts = np.nonzero(xs[1:] != xs[:-1])[0] + 1
    if len(cuts) == 0:
        return np.inf, None
    cum_pos = np.cumsum(ys)
    n_left = cuts.astype(float)
    pos_left = cum_pos[cuts - 1]
    pos_right = cum_pos[-1] - pos_left
    n_right = n - n_left
    impurity = (n_left * _gini(pos_left, n_left) + n_right * _gini(pos_right, n_right)) / n
    best = int(np.argmin(impurity))
    return impurity[best], xs[cuts[best]]


def _grow(X, y, depth, max_depth, n_candidates, rng):
    probability = float(y.mean())
    node = TreeNode(probability=probability)
    if depth >= max_depth or len(y) < 2 or probability in (0.0, 1.0):
        return node

    parent = _gini(y.sum(), len(y))
    features = rng.choice(X.shape[1], size=n_candidates, replace=False)
    best_impurity, best_feature, best_threshold = np.inf, None, None
    for f in features:
        impurity, threshold = _best_split(X[:, f], y)
        if impurity < best_impurity:
            best_impurity, best_feature, best_threshold = impurity, f, threshold
    if best_feature is None or best_impurity >= parent - 1e-12:
        return node

    goes_left = X[:, best_feature] < best_threshold
    node.feature = int(best_feature)
    node.threshold = float(best_threshold)
    node.left = _grow(X[goes_left], y[goes_left], depth + 1, max_depth, n_candidates, rng)
    node.right = _grow(X[~goes_left], y[~goes_left], depth + 1, max_depth, n_candidates, rng)
    return node


def candidate_count(max_features, d):
    """Features tried per node: 'sqrt', 'all' or an explicit count."""
    if max_features == 'sqrt':
        return max(1, int(np.sqrt(d)))
    if max_features == 'all':
        return d
    if isinstance(max_features, (int, np.integer)) and not isinstance(max_features, bool) \
            and 1 <= max_features <= d:
        return int(max_features)
    raise InvalidArgumentError(
        f'max_features must be sqrt, all or an int in [1, {d}], got {max_features!r}')


def _fit_tree(X, y, max_depth, n_candidates, seed, tree_index):
    # stream keyed by (seed, tree index): independent of the parallel schedule
    rng = np.random.default_rng([seed, tree_index])
    n = len(y)
    sample = rng.integers(0, n, size=n)
    return _grow(X[sample], y[sample], 0, max_depth, n_candidates, rng)


def fit_forest(X, A, n_trees=100, max_depth=4, seed=0, clip=DEFAULT_CLIP, n_jobs=1,
               max_features='sqrt'):
    X = np.asarray(X, dtype=float)
    A = np.asarray(A, dtype=float).ravel()
    clip = check_clip(clip)
    n_candidates = candidate_count(max_features, X.shape[1])
    if len(X) < 10 or len(X) != len(A):
        raise InvalidArgumentError('the propensity forest needs at least 10 matching rows')

    if A.min() == A.max():
        rate = float(np.clip(A.mean(), *clip))
        logger.warning('single-class treatment in %d rows: constant propensity %.3f', len(A), rate)
        return OraclePropensity(function=lambda Z, rate=rate: np.full(len(Z), rate),
                                tag=f'constant:{rate!r}', clip=clip)

    trees = Parallel(n_jobs=n_jobs)(
        delayed(_fit_tree)(X, A, max_depth, n_candidates, seed, i) for i in range(n_trees))
    logger.info('propensity forest: %d trees, max depth %d, %d of %d features per node, %d rows',
                n_trees, max_depth, n_candidates, X.shape[1], len(A))
    return ForestPropensity(trees=trees, n_features=X.shape[1], clip=clip)
