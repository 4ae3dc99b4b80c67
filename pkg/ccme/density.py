"""Conditional counterfactual densities p(y | v) = <mu(v), phi(y)>.

Ridge and deep-feature models are linear in the pseudo-outcomes,
p(y | v) = sum_i <xi_i, phi(y)> beta_i(v), so a curve is the pseudo-outcome
evaluation matrix times the second-stage weights. Neural-kernel models
expand over their grid: p(y | v) = sum_j f(v)_j k(g_j, y).
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from ccme.errors import InvalidArgumentError
from ccme.kernels import as_points, gram
from ccme.utils import atomic_write

logger = logging.getLogger(__name__)

# conditioning points per block in curve_matrix
BLOCK_SIZE = 1000


@dataclass
class DensityQuery:
    v: np.ndarray
    grid: np.ndarray

    def __post_init__(self):
        self.v = np.asarray(self.v, dtype=float).ravel()
        self.grid = as_points(self.grid)
        if len(self.grid) == 0:
            raise InvalidArgumentError('the outcome grid is empty')


@dataclass
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray
    mass: float = None

    @property
    def min_value(self):
        return float(self.values.min())

    @property
    def negative_fraction(self):
        return float(np.mean(self.values < 0))


def _curve(query, values, mass):
    if not np.all(np.isfinite(values)):
        raise InvalidArgumentError('density evaluation produced non-finite values')
    return DensityCurve(query.grid, values, mass)


def _linear_curve(model, query):
    y = model.check_y(query.grid)
    weights = model.linear_weights(query.v)[:, 0]
    values = model.pseudo.evaluate(y) @ weights
    mass = float(model.pseudo.mass() @ weights) if model.kernel_y.normalized else None
    return _curve(query, values, mass)


def eval_density_rr(model, query):
    if model.method != 'rr':
        raise InvalidArgumentError(f'expected a ridge model, got {model.method!r}')
    return _linear_curve(model, query)


def eval_density_df(model, query):
    if model.method != 'df':
        raise InvalidArgumentError(f'expected a deep-feature model, got {model.method!r}')
    return _linear_curve(model, query)


def eval_density_nk(model, query):
    if model.method != 'nk':
        raise InvalidArgumentError(f'expected a neural-kernel model, got {model.method!r}')
    y = model.check_y(query.grid)
    f = model.grid_coefficients(query.v)[0]
    values = gram(model.kernel_y, y, model.grid) @ f
    mass = float(f.sum()) if model.kernel_y.normalized else None
    return _curve(query, values, mass)


EVALUATORS = {'rr': eval_density_rr, 'df': eval_density_df, 'nk': eval_density_nk}


def eval_density(model, query):
    return EVALUATORS[model.method](model, query)


def density_mass(model, v):
    """Exact integral of p(. | v) over the outcome space."""
    if not model.kernel_y.normalized:
        raise InvalidArgumentError('density mass needs the normalized outcome kernel')
    if model.method == 'nk':
        return float(model.grid_coefficients(v)[0].sum())
    return float(model.pseudo.mass() @ model.linear_weights(v)[:, 0])


def curve_matrix(model, V, y):
    """Densities at every (y_k, v_q) as a (len(y) x len(V)) matrix."""
    V = as_points(V)
    y = model.check_y(y)
    if model.method == 'nk':
        basis = gram(model.kernel_y, y, model.grid)
    else:
        basis = model.pseudo.evaluate(y)

    blocks = []
    for start in range(0, len(V), BLOCK_SIZE):
        chunk = V[start:start + BLOCK_SIZE]
        if model.method == 'nk':
            blocks.append(basis @ model.grid_coefficients(chunk).T)
        else:
            blocks.append(basis @ model.linear_weights(chunk))
    return np.hstack(blocks)


def curves_frame(curves):
    """Long-format table (v_id, y, density); y1..yk for vector outcomes."""
    frames = []
    for v_id, curve in enumerate(curves):
        d_y = curve.grid.shape[1]
        columns = ['y'] if d_y == 1 else [f'y{j + 1}' for j in range(d_y)]
        frame = pd.DataFrame(curve.grid, columns=columns)
        frame.insert(0, 'v_id', v_id)
        frame['density'] = curve.values
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def export_curves(curves, path):
    frame = curves_frame(curves)
    with atomic_write(path) as handle:
        frame.to_csv(handle, index=False)
    logger.info('wrote %d curves (%d rows) to %s', len(curves), len(frame), path)
    return frame
