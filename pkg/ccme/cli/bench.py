import logging
import os

import click

from ccme.cli.options import config_options, default_path
from ccme.errors import ConfigurationError, NumericError
from ccme.synthbench import (build_cells, read_sweep, records_frame, run_profiles, run_sweep,
                             summarize, write_frame)
from ccme.synthbench.truth import PROFILES

logger = logging.getLogger(__name__)


@click.command()
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Sweep CSV path.')
@config_options
def sweep(config, out_path):
    """Run the Monte Carlo grid of methods x variants x scenarios x n x seeds."""
    out_path = out_path or default_path(config, 'sweep.csv')
    cells = build_cells(config)
    if not cells:
        raise ConfigurationError('no sweep cells left after filtering')

    frame = records_frame(run_sweep(config, cells))
    write_frame(frame, out_path)
    ok = int((frame['status'] == 'ok').sum())
    click.echo(f'{ok} of {len(frame)} cells succeeded -> {out_path}', err=True)
    if ok == 0:
        raise NumericError('every sweep cell failed; see the reason column')


@click.command()
@click.argument('sweep_path', type=click.Path(dir_okay=False))
@click.option('--out', 'out_path', type=click.Path(dir_okay=False),
              help='Summary CSV; slopes go to <out>.slopes.csv.')
def report(sweep_path, out_path):
    """Median MSE per cell and log-log slope per curve."""
    summary, slopes, n_failed = summarize(read_sweep(sweep_path))
    click.echo(summary.to_string(index=False))
    click.echo()
    click.echo(slopes.to_string(index=False))
    click.echo(f'{n_failed} failed rows excluded', err=True)

    if out_path:
        write_frame(summary, out_path)
        stem, _ = os.path.splitext(out_path)
        write_frame(slopes, f'{stem}.slopes.csv')


@click.command('profiles')
@click.option('--runs', type=int, help='Number of fits (default: one per configured seed).')
@click.option('--profile', 'profiles', multiple=True, type=click.Choice(sorted(PROFILES)))
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Band CSV path.')
@config_options
def profiles_command(config, runs, profiles, out_path):
    """Median and percentile bands of the density at fixed covariate profiles."""
    out_path = out_path or default_path(config, 'profiles.csv')
    seeds = config.seeds if runs is None else range(runs)
    frame, n_failed = run_profiles(config, runs=seeds, names=profiles or ('v1', 'v2'))
    write_frame(frame, out_path)
    click.echo(f'{len(seeds) - n_failed} of {len(seeds)} runs -> {out_path}', err=True)
