"""Options shared by every command and their resolution into a RunConfig."""
import functools
import os

import click

from ccme import create_run_config
from ccme.errors import ConfigurationError
from ccme.runconfig import METHODS, SCENARIOS, VARIANTS
from config import Config, DeskConfig, TestingConfig

PRESETS = {'full': Config, 'desk': DeskConfig, 'testing': TestingConfig}


def parse_filters(values):
    filters = {}
    for item in values:
        key, sep, value = item.partition('=')
        if not sep or not key.strip():
            raise ConfigurationError(f'--filter expects KEY=VALUE, got {item!r}')
        filters[key.strip().lower()] = value.strip()
    return filters


def parse_floats(text, name):
    try:
        return [float(part) for part in text.split(',') if part.strip()]
    except ValueError as exc:
        raise ConfigurationError(f'{name}: expected comma-separated numbers, got {text!r}') from exc


def config_options(func):
    """Decorate a command with the run-configuration options."""
    options = [
        click.option('--config', 'config_path', type=click.Path(dir_okay=False),
                     help='JSON file with config overrides.'),
        click.option('--preset', type=click.Choice(sorted(PRESETS)),
                     help='Named defaults: full (default sweep), desk (CI scale), testing.'),
        click.option('--seed', type=int),
        click.option('--method', type=click.Choice(METHODS, case_sensitive=False)),
        click.option('--variant', type=click.Choice(VARIANTS, case_sensitive=False)),
        click.option('--scenario', type=click.Choice(SCENARIOS, case_sensitive=False)),
        click.option('--n', 'n', type=int, help='Sample size.'),
        click.option('--grid-size', type=int, help='Feature count (DF) or grid size (NK).'),
        click.option('--grid-mode', type=click.Choice(['uniform', 'sample'])),
        click.option('--threads', type=int, envvar='CCME_THREADS', help='Worker processes.'),
        click.option('--filter', 'filters', multiple=True, help='KEY=VALUE cell filter (sweep).'),
        click.option('--print-config', is_flag=True, help='Print the resolved config and exit.'),
    ]
    for option in reversed(options):
        func = option(func)

    @functools.wraps(func)
    @click.pass_context
    def wrapper(ctx, config_path, preset, filters, print_config, **kwargs):
        overrides = {key: (value.lower() if isinstance(value, str) else value)
                     for key, value in kwargs.items()
                     if key in ('seed', 'method', 'variant', 'scenario', 'n', 'grid_size',
                                'grid_mode', 'threads')}
        if filters:
            overrides['filters'] = parse_filters(filters)
        config_class = PRESETS[preset] if preset else ctx.obj.get('config_class', Config)
        config = create_run_config(config_class, config_path, overrides)
        if print_config:
            click.echo(config.dump())
            ctx.exit(0)
        for key in overrides:
            kwargs.pop(key, None)
        return func(config, **kwargs)
    return wrapper


def default_path(config, name):
    return os.path.join(config.output_dir, name)
