"""Closed-form law of the treated outcome given V = X1..X5.

Conditioning on V leaves X6..X10 ~ N(1, I_5) untouched, so with c = beta + gamma

    Y1 | V = v  ~  p N(m0 + 15, s2) + (1 - p) N(m0, s2)
    p  = logistic(0.5 v1)
    m0 = 3 + sum_{j<=5} c_j v_j + sum_{j>5} c_j
    s2 = sum_{j>5} c_j^2 + s(v)^2
"""
from dataclasses import dataclass

import numpy as np
from scipy.stats import norm

from ccme.kernels import as_points
from ccme.synthbench.dgp import (BETA, GAMMA, N_COVARIATES, SHIFT, TREATED_INTERCEPT, V_DIM,
                                 noise_scale, shift_probability)

PROFILES = {
    'v1': (2.2, -0.2, 2.2, -0.2, 2.2),
    'v2': (-0.2, 2.2, -0.2, 2.2, -0.2),
}


@dataclass(frozen=True)
class GroundTruth:
    beta: tuple = BETA
    gamma: tuple = GAMMA

    @property
    def c(self):
        return np.asarray(self.beta, dtype=float) + np.asarray(self.gamma, dtype=float)

    @property
    def tail_mean(self):
        return float(self.c[V_DIM:].sum())

    @property
    def tail_variance(self):
        return float(np.sum(self.c[V_DIM:] ** 2))

    def _points(self, V):
        V = np.asarray(V, dtype=float)
        return V.reshape(1, -1) if V.ndim == 1 else V

    def mixture_weight(self, V):
        return shift_probability(self._points(V)[:, 0])

    def mean0(self, V):
        V = self._points(V)
        return TREATED_INTERCEPT + V @ self.c[:V_DIM] + self.tail_mean

    def mean1(self, V):
        return self.mean0(V) + SHIFT

    def variance(self, V):
        return self.tail_variance + noise_scale(self._points(V)) ** 2

    def density(self, V, y):
        """p1(y_k | v_q) as a (len(y) x len(V)) matrix."""
        y = as_points(y)[:, :1]
        p, m0, sd = self.mixture_weight(V), self.mean0(V), np.sqrt(self.variance(V))
        return p * norm.pdf(y, m0 + SHIFT, sd) + (1 - p) * norm.pdf(y, m0, sd)

    def cdf(self, v, y):
        p, m0, sd = self.mixture_weight(v), self.mean0(v), np.sqrt(self.variance(v))
        y = np.asarray(y, dtype=float)
        return p[0] * norm.cdf(y, m0[0] + SHIFT, sd[0]) + (1 - p[0]) * norm.cdf(y, m0[0], sd[0])

    def sample(self, v, size, rng):
        """Monte Carlo draws of Y1 | V = v from the generating process itself."""
        v = np.asarray(v, dtype=float).ravel()
        X = np.empty((size, N_COVARIATES))
        X[:, :V_DIM] = v
        X[:, V_DIM:] = rng.normal(1.0, 1.0, size=(size, N_COVARIATES - V_DIM))
        S = SHIFT * (rng.random(size) < shift_probability(X[:, 0]))
        return TREATED_INTERCEPT + X @ self.c + S + rng.normal(0.0, noise_scale(X))


def true_density(v, y, truth=None):
    """Mixture density at one conditioning point; vectorized over y."""
    truth = truth or GroundTruth()
    values = truth.density(np.asarray(v, dtype=float).ravel(), np.atleast_1d(y))[:, 0]
    return float(values[0]) if np.ndim(y) == 0 else values
