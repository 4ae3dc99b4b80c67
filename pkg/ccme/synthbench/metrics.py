import numpy as np

from ccme.density import curve_matrix
from ccme.errors import InvalidArgumentError


def mse(model, truth, test_v, y_grid):
    """Joint mean over test points and grid points of the squared density error.

    ``model`` is a fitted model, or any callable ``(V, y) -> (len(y) x len(V))``.
    """
    estimate = model(test_v, y_grid) if callable(model) else curve_matrix(model, test_v, y_grid)
    return float(np.mean((estimate - truth.density(test_v, y_grid)) ** 2))


def loglog_slope(ns, mses):
    """Least-squares slope of log(mse) against log(n)."""
    ns = np.asarray(ns, dtype=float)
    mses = np.asarray(mses, dtype=float)
    if len(ns) != len(mses) or len(ns) < 3:
        raise InvalidArgumentError('loglog_slope needs at least 3 (n, mse) pairs')
    if np.any(ns <= 0) or np.any(mses <= 0):
        raise InvalidArgumentError('loglog_slope needs positive n and mse values')
    return float(np.polyfit(np.log(ns), np.log(mses), 1)[0])
