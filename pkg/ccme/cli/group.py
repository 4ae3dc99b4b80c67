import logging

import click

from config import Config


@click.group()
@click.option('--verbose', '-v', is_flag=True, help='Log at DEBUG level.')
@click.pass_context
def cli(ctx, verbose):
    """Doubly robust conditional counterfactual mean embeddings."""
    ctx.ensure_object(dict)
    ctx.obj.setdefault('config_class', getattr(cli, 'config_class', Config))
    if verbose:
        logging.getLogger('ccme').setLevel(logging.DEBUG)
