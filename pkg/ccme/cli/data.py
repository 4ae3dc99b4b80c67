import logging

import click

from ccme.cli.options import config_options, default_path
from ccme.dataio import write_dataset
from ccme.synthbench import DgpConfig, generate

logger = logging.getLogger(__name__)


@click.command()
@click.option('--out', 'out_path', type=click.Path(dir_okay=False), help='Dataset CSV path.')
@config_options
def simulate(config, out_path):
    """Draw a synthetic dataset (x1..x10, a, y) and its metadata file."""
    out_path = out_path or default_path(config, 'data.csv')
    dataset = generate(DgpConfig(n=config.n, seed=config.seed, scenario=config.scenario))[0]
    write_dataset(dataset, out_path, meta={'seed': config.seed, 'scenario': config.scenario})
    click.echo(f'{len(dataset)} rows ({int(dataset.A.sum())} treated) -> {out_path}', err=True)
