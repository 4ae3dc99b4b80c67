"""Doubly robust pseudo-outcomes, kept in coefficient form.

Row i of D1 stands for the RKHS element

    xi_i = w_i phi(Y_i) + u_i sum_p C[p, i] phi(a_p)

with outcome weight ``w``, model weight ``u``, first-stage coefficients
``C`` (anchors x rows) and anchors ``a``. The variants only differ in how
they fill these in:

    dr       w = omega, u = 1 - omega
    ipw      w = omega, u = 0
    pi       w = 0,     u = 1
    onestep  w = 1,     u = 0 on the treated rows of D1

Nothing is ever materialized in the RKHS: every consumer needs inner
products with phi(y) or between pseudo-outcomes, and those only take Gram
entries.
"""
import logging
from dataclasses import dataclass

import numpy as np

from ccme.errors import DegenerateDataError, InvalidArgumentError
from ccme.kernels import KernelSpec, as_points, gram

logger = logging.getLogger(__name__)


def compute_omega(d1, propensity):
    """Inverse-propensity weights A_i / pi(X_i); exactly zero on control rows."""
    omega = np.zeros(len(d1))
    treated = d1.treated
    if len(treated):
        omega[treated] = 1.0 / np.atleast_1d(propensity.predict(d1.X[treated]))
    return omega


@dataclass
class PseudoOutcomes:
    kernel_y: KernelSpec
    outcomes: np.ndarray
    outcome_weight: np.ndarray
    model_weight: np.ndarray
    coefficients: np.ndarray
    anchors: np.ndarray

    def __post_init__(self):
        self.outcomes = as_points(self.outcomes)
        n, d_y = self.outcomes.shape
        self.outcome_weight = np.asarray(self.outcome_weight, dtype=float).ravel()
        self.model_weight = np.asarray(self.model_weight, dtype=float).ravel()
        self.coefficients = np.asarray(self.coefficients, dtype=float).reshape(-1, n)
        self.anchors = np.asarray(self.anchors, dtype=float).reshape(-1, d_y)
        if len(self.outcome_weight) != n or len(self.model_weight) != n:
            raise InvalidArgumentError('pseudo-outcome weights do not match the row count')
        if len(self.coefficients) != len(self.anchors):
            raise InvalidArgumentError(
                f'{len(self.coefficients)} coefficient rows for {len(self.anchors)} anchors')

    @property
    def rows(self):
        return len(self.outcomes)

    @property
    def d_y(self):
        return self.outcomes.shape[1]

    @property
    def uses_model(self):
        return len(self.anchors) > 0 and np.any(self.model_weight != 0)

    def _model_part(self):
        # C D_u: first-stage coefficients scaled by the model weight of their row
        return self.coefficients * self.model_weight

    def evaluate(self, y):
        """Matrix of <xi_i, phi(y_k)>, one row per query point y_k."""
        y = as_points(y)
        out = gram(self.kernel_y, y, self.outcomes) * self.outcome_weight
        if self.uses_model:
            out += gram(self.kernel_y, y, self.anchors) @ self._model_part()
        return out

    def grid_targets(self, grid):
        """b_i = <xi_i, phi(grid_j)> as an (rows x grid) matrix."""
        return self.evaluate(grid).T

    def mass(self):
        """Integral of each <xi_i, phi(.)> under a normalized kernel."""
        if not self.kernel_y.normalized:
            raise InvalidArgumentError('mass needs the normalized outcome kernel')
        out = self.outcome_weight.copy()
        if self.uses_model:
            out += self._model_part().sum(axis=0)
        return out

    def target_gram(self):
        """K_xi[i, j] = <xi_i, xi_j>."""
        w = self.outcome_weight
        K = gram(self.kernel_y, self.outcomes, self.outcomes) * np.outer(w, w)
        if self.uses_model:
            model = self._model_part()
            cross = (w[:, None] * gram(self.kernel_y, self.outcomes, self.anchors)) @ model
            K += cross + cross.T
            K += model.T @ gram(self.kernel_y, self.anchors, self.anchors) @ model
        return 0.5 * (K + K.T)


def _empty(d_y, n):
    return np.zeros((0, n)), np.zeros((0, d_y))


def pseudo_targets(variant, first_stage, d1, kernel_y):
    """Coefficient form of the variant's pseudo-outcomes on D1."""
    Y = d1.Y
    n, d_y = Y.shape

    if variant == 'onestep':
        if first_stage is not None:
            logger.warning('one-step regression ignores the supplied first stage')
        treated = d1.treated
        if len(treated) == 0:
            raise DegenerateDataError('no treated rows in D1 for the one-step regression')
        return PseudoOutcomes(kernel_y, Y[treated], np.ones(len(treated)), np.zeros(len(treated)),
                              *_empty(d_y, len(treated)))

    if n == 0:
        raise DegenerateDataError('D1 is empty')
    if variant == 'pi':
        omega = np.zeros(n)
        w, u = omega, np.ones(n)
    else:
        omega = compute_omega(d1, first_stage.propensity)
        w, u = omega, (1.0 - omega if variant == 'dr' else np.zeros(n))

    if variant == 'ipw':
        C, anchors = _empty(d_y, n)
    elif variant in ('dr', 'pi'):
        C, anchors = first_stage.coefficients(d1.X), first_stage.anchors
    else:
        raise InvalidArgumentError(f'unknown variant {variant!r}')
    return PseudoOutcomes(kernel_y, Y, w, u, C, anchors)


def build_k_xi(variant, first_stage, split, kernel_y):
    return pseudo_targets(variant, first_stage, split.d1, kernel_y).target_gram()
