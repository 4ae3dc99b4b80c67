# ccme/cli/__init__.py
from .group import cli
