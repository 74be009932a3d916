import click
from flask import Blueprint, current_app

from mppa.acceptance import CRITERIA_COLUMNS, run_acceptance
from mppa.commands import ConfigFailure, echo_csv, fail, load_experiment, tolerances
from mppa.experiment import FAIL, validate

verify_bp = Blueprint('verify', __name__, cli_group=None)


@verify_bp.cli.command('verify')
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--tol', type=float, default=None)
@click.option('--slack', type=float, default=None)
def verify(config_path, tol, slack):
    """Run the acceptance criteria against an experiment."""
    config = load_experiment(config_path)
    tol = tolerances(tol, slack)
    report = validate(config, tol)
    if report.blocking:
        raise ConfigFailure(f"{config.name}: " + "; ".join(str(v) for v in report.blocking))
    rows = run_acceptance(config, tol, current_app.config['ORACLE_SEED'], report)
    echo_csv(CRITERIA_COLUMNS, [(row.criterion, row.status, row.detail) for row in rows])
    if any(row.status == FAIL for row in rows):
        fail()
