"""Shared plumbing of the CLI blueprints: loading experiments with the app's
configuration applied, exit codes and CSV on stdout."""
import csv
import io
import logging

import click
from flask import current_app

from mppa.bounds import Budget
from mppa.configfile import load_config
from mppa.errors import ConfigError
from mppa.experiment import Tolerances

logger = logging.getLogger(__name__)

EXIT_PROPERTY_FAILURE = 1


class ConfigFailure(click.ClickException):
    """Rejected experiment file or moduli; exits with status 2."""

    exit_code = 2


def load_experiment(path):
    try:
        config = load_config(path)
    except ConfigError as err:
        raise ConfigFailure(f"{path}: " + "\n  ".join(err.errors)) from None
    app_config = current_app.config
    bits = int(app_config['BUDGET_BITS']) if app_config.get('BUDGET_BITS') else config.budget.max_bits
    calls = int(app_config['BUDGET_CALLS']) if app_config.get('BUDGET_CALLS') else config.budget.max_calls
    config.budget = Budget(bits, calls)
    if config.horizon > app_config['MAX_HORIZON']:
        raise ConfigFailure(f"{path}: horizon {config.horizon} exceeds the limit {app_config['MAX_HORIZON']}")
    return config


def tolerances(tol=None, slack=None):
    app_config = current_app.config
    return Tolerances(identity=app_config['IDENTITY_TOL'] if tol is None else tol,
                      slack=app_config['INEQUALITY_SLACK'] if slack is None else slack)


def echo_csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    click.echo(buf.getvalue(), nl=False)


def fail():
    click.get_current_context().exit(EXIT_PROPERTY_FAILURE)
