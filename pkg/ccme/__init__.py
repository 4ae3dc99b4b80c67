import logging
import logging.config
import os

from config import Config
from ccme.runconfig import RunConfig, _coerce, load_json


def create_run_config(config_class=Config, config_path=None, overrides=None):
    config = RunConfig.from_object(config_class)

    if config_path:
        config = config.update(load_json(config_path))
    if overrides:
        config = config.update(overrides)

    return _coerce(config).validate()


def configure_logging(config_class=Config, level=None):
    path = config_class.LOGGING_CONFIG
    if path and os.path.exists(path):
        logging.config.fileConfig(path, disable_existing_loggers=False)
    else:
        logging.basicConfig(format='%(levelname)-5.5s [%(name)s] %(message)s')

    logging.getLogger('ccme').setLevel(level or config_class.LOG_LEVEL)


def create_cli(config_class=Config):
    configure_logging(config_class)

    from ccme.cli import cli
    cli.config_class = config_class

    # Import and register commands
    from ccme.cli.data import simulate
    cli.add_command(simulate)

    from ccme.cli.model import density, fit
    cli.add_command(fit)
    cli.add_command(density)

    from ccme.cli.bench import profiles_command, report, sweep
    cli.add_command(sweep)
    cli.add_command(report)
    cli.add_command(profiles_command)

    return cli
