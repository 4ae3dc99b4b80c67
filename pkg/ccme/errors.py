"""Exceptions raised by ccme.

Every exception is a :class:`click.ClickException`, so the command line
prints the message on stderr and exits with the class ``exit_code``
without any translation layer.
"""
import click


class CcmeError(click.ClickException):
    exit_code = 1


class OutputError(CcmeError):
    exit_code = 2


class InvalidArgumentError(CcmeError):
    exit_code = 3


class DataFormatError(CcmeError):
    exit_code = 3


class DegenerateDataError(CcmeError):
    exit_code = 4


class ConfigurationError(CcmeError):
    exit_code = 4


class NumericError(CcmeError):
    exit_code = 5

    def __init__(self, message, pivot=None, epoch=None):
        super().__init__(message)
        self.pivot = pivot
        self.epoch = epoch
