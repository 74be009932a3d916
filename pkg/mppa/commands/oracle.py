import logging

import click
from flask import Blueprint, current_app

from mppa import oracle
from mppa.commands import echo_csv, fail

logger = logging.getLogger(__name__)

oracle_bp = Blueprint('oracle', __name__, cli_group=None)

SUMMARY_COLUMNS = ("lemma", "trials", "passed", "verdict")
FAILURE_COLUMNS = ("lemma", "trial", "detail")


@oracle_bp.cli.command('oracle')
@click.option('--lemma', type=click.Choice(oracle.LEMMAS), default=None, help="Suite to run (default: all).")
@click.option('--seed', type=int, default=None, help="Generator seed (default ORACLE_SEED).")
@click.option('--trials', type=click.IntRange(min=0), default=1000)
def run_oracle(lemma, seed, trials):
    """Brute-force the combinatorial lemmas on seeded random instances."""
    seed = current_app.config['ORACLE_SEED'] if seed is None else seed
    if trials == 0:
        logger.warning("no trials requested; every suite passes vacuously")
    results = [oracle.run_suite(name, seed, trials) for name in ([lemma] if lemma else oracle.LEMMAS)]
    echo_csv(SUMMARY_COLUMNS, [(r.lemma, r.trials, r.passed, "PASS" if r.ok else "FAIL") for r in results])
    failures = [(r.lemma, *r.failures[0]) for r in results if r.failures]
    if failures:
        click.echo()
        echo_csv(FAILURE_COLUMNS, failures)
        fail()
