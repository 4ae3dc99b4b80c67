"""Gaussian kernels, Gram matrices and ridge-regularized Cholesky solves.

Points are passed as arrays of shape (n, d). A 1-d array is read as n
points of dimension 1; a scalar as a single 1-d point.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve
from scipy.linalg.lapack import dpotrf
from scipy.spatial.distance import cdist

from ccme.errors import InvalidArgumentError, NumericError

logger = logging.getLogger(__name__)

GAUSSIAN = 'gaussian'
FAMILIES = (GAUSSIAN,)


@dataclass(frozen=True)
class KernelSpec:
    bandwidth: float
    normalized: bool = False
    family: str = GAUSSIAN

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise InvalidArgumentError(f'unsupported kernel family {self.family!r}')
        if not np.isfinite(self.bandwidth) or self.bandwidth <= 0:
            raise InvalidArgumentError(f'kernel bandwidth must be positive, got {self.bandwidth}')

    def scale(self, d):
        """Value of k(y, y): the sup of the kernel over R^d."""
        if self.normalized:
            return float((np.sqrt(2.0 * np.pi) * self.bandwidth) ** (-d))
        return 1.0

    def __call__(self, points_a, points_b):
        return gram(self, points_a, points_b)


def as_points(values):
    points = np.asarray(values, dtype=float)
    if points.ndim == 0:
        return points.reshape(1, 1)
    if points.ndim == 1:
        return points.reshape(-1, 1)
    if points.ndim != 2:
        raise InvalidArgumentError(f'points must be at most 2-d, got shape {points.shape}')
    return points


def kernel_eval(spec, u, v):
    u = np.atleast_1d(np.asarray(u, dtype=float)).reshape(1, -1)
    v = np.atleast_1d(np.asarray(v, dtype=float)).reshape(1, -1)
    return float(gram(spec, u, v)[0, 0])


def gram(spec, points_a, points_b):
    a = as_points(points_a)
    b = as_points(points_b)
    if len(a) == 0 or len(b) == 0:
        raise InvalidArgumentError('gram needs non-empty point lists')
    if a.shape[1] != b.shape[1]:
        raise InvalidArgumentError(f'dimension mismatch: {a.shape[1]} vs {b.shape[1]}')

    # every entry is computed independently, so gram(P, P) is exactly symmetric
    sq_dist = cdist(a, b, 'sqeuclidean')
    values = np.exp(-sq_dist / (2.0 * spec.bandwidth ** 2))
    if spec.normalized:
        values *= spec.scale(a.shape[1])
    return values


@dataclass(frozen=True)
class CholeskyFactor:
    """Lower Cholesky factor of ``K + ridge * I``."""
    lower: np.ndarray
    ridge: float

    @property
    def size(self):
        return self.lower.shape[0]

    def solve(self, rhs):
        rhs = np.asarray(rhs, dtype=float)
        if rhs.shape[0] != self.size:
            raise InvalidArgumentError(f'rhs has {rhs.shape[0]} rows, expected {self.size}')
        return cho_solve((self.lower, True), rhs, check_finite=False)

    def matrix(self):
        return self.lower @ self.lower.T


def factorize(K, ridge):
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InvalidArgumentError(f'expected a square matrix, got shape {K.shape}')
    if not ridge > 0:
        raise InvalidArgumentError(f'ridge must be positive, got {ridge}')

    shifted = K + ridge * np.eye(K.shape[0])
    lower, info = dpotrf(shifted, lower=1, clean=1, overwrite_a=0)
    if info > 0:
        raise NumericError(f'matrix not positive definite at pivot {info - 1}', pivot=info - 1)
    if info < 0:
        raise InvalidArgumentError(f'invalid argument {-info} to the Cholesky factorization')
    return CholeskyFactor(lower=lower, ridge=float(ridge))


def regularized_solve(K, ridge, rhs):
    """Solve ``(K + ridge * I) X = rhs``. ``ridge`` is already scaled (n * lambda)."""
    return factorize(K, ridge).solve(rhs)
