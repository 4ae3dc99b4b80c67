import numpy as np


def synthetic_propensity(X):
    """pi(X) = 0.1 + 0.8 * I(X1 in [0, 2] and X6 >= 1.5)."""
    X = np.asarray(X, dtype=float)
    inside = (X[:, 0] >= 0.0) & (X[:, 0] <= 2.0) & (X[:, 5] >= 1.5)
    return 0.1 + 0.8 * inside


def unit_propensity(X):
    return np.ones(len(X))


ORACLES = {
    'synthetic': synthetic_propensity,
    'one': unit_propensity,
}
