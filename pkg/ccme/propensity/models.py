import logging
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ccme.errors import InvalidArgumentError

logger = logging.getLogger(__name__)

DEFAULT_CLIP = (0.01, 0.99)


def check_clip(clip):
    lo, hi = clip
    if not 0 < lo < hi < 1:
        raise InvalidArgumentError(f'clip bounds must satisfy 0 < lo < hi < 1, got {clip}')
    return float(lo), float(hi)


class PropensityModel:
    """Estimated P(A = 1 | X = x), clipped to ``[lo, hi]``."""

    clip = DEFAULT_CLIP
    n_features = None

    def raw_predict(self, X):
        raise NotImplementedError

    def predict(self, X):
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        X = X.reshape(1, -1) if single else X
        if self.n_features is not None and X.shape[1] != self.n_features:
            raise InvalidArgumentError(
                f'propensity model expects {self.n_features} covariates, got {X.shape[1]}')
        p = self.raw_predict(X)
        if self.clip is not None:
            p = np.clip(p, *self.clip)
        return float(p[0]) if single else p


@dataclass
class LogisticPropensity(PropensityModel):
    coef: np.ndarray
    intercept: float
    clip: tuple = DEFAULT_CLIP

    @property
    def n_features(self):
        return len(self.coef)

    def raw_predict(self, X):
        return expit(X @ self.coef + self.intercept)


@dataclass
class ForestPropensity(PropensityModel):
    trees: list
    n_features: int
    clip: tuple = DEFAULT_CLIP

    def raw_predict(self, X):
        return np.mean([tree.predict(X) for tree in self.trees], axis=0)


@dataclass
class OraclePropensity(PropensityModel):
    """Known propensity function; ``clip=None`` leaves it unclipped."""
    function: object
    tag: str = 'custom'
    clip: tuple = DEFAULT_CLIP

    def raw_predict(self, X):
        return np.asarray(self.function(X), dtype=float) * np.ones(len(X))


def clipped_fraction(model, X):
    """Share of predictions sitting on a clip bound (positivity diagnostic)."""
    if model.clip is None or len(X) == 0:
        return 0.0
    p = model.predict(X)
    lo, hi = model.clip
    return float(np.mean((p <= lo) | (p >= hi)))
