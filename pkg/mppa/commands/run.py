import logging

import click
from flask import Blueprint, current_app

from mppa import experiment
from mppa.commands import ConfigFailure, fail, load_experiment, tolerances

logger = logging.getLogger(__name__)

run_bp = Blueprint('run', __name__, cli_group=None)


@run_bp.cli.command('run')
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--out', 'out_dir', default=None, help="Output directory (default OUTPUT_DIR).")
@click.option('--tol', type=float, default=None, help="Tolerance of identity checks.")
@click.option('--slack', type=float, default=None, help="Slack of inequality checks.")
def run_experiment(config_path, out_dir, tol, slack):
    """Run an experiment and write trace, metastability, regularity and checks CSVs."""
    config = load_experiment(config_path)
    tol = tolerances(tol, slack)
    logger.info("%s: %s, %s, horizon %d", config.name, config.op.describe(), config.schedule.describe(),
                config.horizon)

    report = experiment.validate(config, tol)
    if report.blocking:
        for violation in report.blocking:
            click.echo(str(violation), err=True)
        raise ConfigFailure(f"{config.name}: moduli conditions (Q1)-(Q6) do not hold")

    result = experiment.execute(config, tol, report)
    out = experiment.write_tables(result, out_dir or current_app.config['OUTPUT_DIR'])
    failed = [row.check for row in result.checks if row.status == experiment.FAIL]
    logger.info("%s: done, %d check(s) failed%s", config.name, len(failed),
                f" ({', '.join(failed)})" if failed else "")
    click.echo(str(out))
    if result.failed:
        fail()
