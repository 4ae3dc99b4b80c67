import logging

import click
import numpy as np
import pandas as pd

from ccme.cli.options import config_options, default_path, parse_floats
from ccme.dataio import read_dataset
from ccme.density import DensityQuery, curves_frame, eval_density, export_curves
from ccme.errors import DataFormatError, InvalidArgumentError
from ccme.estimators import fit_ccme, load_model, save_model
from ccme.synthbench import PROFILES

logger = logging.getLogger(__name__)


@click.command()
@click.argument('data_path', type=click.Path(dir_okay=False))
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Model file (.npz).')
@config_options
def fit(config, data_path, out_path):
    """Fit the configured estimator on DATA_PATH and save the model."""
    out_path = out_path or default_path(config, 'model.npz')
    dataset = read_dataset(data_path)
    dataset.v_columns = config.v_column_indices(dataset.X.shape[1])

    model = fit_ccme(dataset, config)
    save_model(model, out_path)
    overlap = model.diagnostics.get('overlap_clipped_fraction')
    if overlap is not None:
        logger.info('propensity predictions on a clip bound: %.1f%%', 100 * overlap)
    click.echo(f'{model.method}/{model.variant} model -> {out_path}', err=True)


def read_v_file(path):
    """One conditioning point per row; a non-numeric first row is a header."""
    try:
        frame = pd.read_csv(path, header=None, dtype=str)
        if pd.to_numeric(frame.iloc[0], errors='coerce').isna().any():
            frame = frame.iloc[1:]
        return frame.to_numpy(dtype=float)
    except (OSError, ValueError) as exc:
        raise DataFormatError(f'cannot read conditioning points {path}: {exc}') from exc


def query_points(v_values, v_file, profiles):
    points = [parse_floats(text, '--v') for text in v_values]
    points += [list(PROFILES[name]) for name in profiles]
    if v_file:
        points += read_v_file(v_file).tolist()
    if not points:
        raise InvalidArgumentError('give at least one conditioning point (--v, --v-file or --profile)')
    return points


@click.command()
@click.argument('model_path', type=click.Path(dir_okay=False))
@click.option('--v', 'v_values', multiple=True, help='Comma-separated conditioning point.')
@click.option('--v-file', type=click.Path(dir_okay=False),
              help='CSV of conditioning points, one per row; header optional.')
@click.option('--profile', 'profiles', multiple=True, type=click.Choice(sorted(PROFILES)),
              help='Named covariate profile.')
@click.option('--grid', 'grid_text', help='Comma-separated outcome grid.')
@click.option('--grid-min', type=float)
@click.option('--grid-max', type=float)
@click.option('--points', type=int, help='Grid points (default: eval_grid_size).')
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Curve CSV (default stdout).')
@config_options
def density(config, model_path, v_values, v_file, profiles, grid_text, grid_min, grid_max, points,
            out_path):
    """Evaluate p(y | v) of a saved model on an outcome grid."""
    model = load_model(model_path)
    if grid_text:
        grid = np.array(parse_floats(grid_text, '--grid'))
    else:
        grid = model.default_grid(points or config.eval_grid_size)
        if grid_min is not None or grid_max is not None:
            lo = grid[0] if grid_min is None else grid_min
            hi = grid[-1] if grid_max is None else grid_max
            grid = np.linspace(lo, hi, points or config.eval_grid_size)

    curves = []
    for v in query_points(v_values, v_file, profiles):
        curve = eval_density(model, DensityQuery(v, grid))
        logger.info('v = %s: mass %s, min %.4g, %.1f%% negative', v, curve.mass, curve.min_value,
                    100 * curve.negative_fraction)
        curves.append(curve)

    if out_path:
        export_curves(curves, out_path)
    else:
        click.echo(curves_frame(curves).to_csv(index=False), nl=False)
