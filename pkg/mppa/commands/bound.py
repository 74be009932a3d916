import click
from flask import Blueprint

from mppa.calculus import BOUND_ARGS
from mppa.commands import ConfigFailure, echo_csv, load_experiment
from mppa.configfile import parse_fspec
from mppa.errors import ModuliError
from mppa.experiment import calculus_for

bound_bp = Blueprint('bound', __name__, cli_group=None)

BOUND_COLUMNS = ("name", "k", "f_spec", "value")


def _describe_args(name, n, M, t, fspec):
    """The f_spec column: the counterfunction, or the scalar arguments."""
    wanted = BOUND_ARGS[name]
    if wanted == ("f",):
        return fspec.text
    parts = [f"{key}={value}" for key, value in (("n", n), ("M", M), ("t", t)) if key in wanted]
    if "f" in wanted:
        parts.append(fspec.text)
    return ";".join(parts)


@bound_bp.cli.command('bound')
@click.argument('config_path', type=click.Path(exists=True, dir_okay=False))
@click.argument('name', type=click.Choice(sorted(BOUND_ARGS)))
@click.option('--k', type=click.IntRange(min=0), default=0)
@click.option('--n', type=click.IntRange(min=0), default=0)
@click.option('--fspec', default="const 0", help="Counterfunction: const K | id | affine A B | table v0,...")
@click.option('--M', 'M', type=click.IntRange(min=0), default=0)
@click.option('--t', type=click.IntRange(min=1), default=1)
def bound(config_path, name, k, n, fspec, M, t):
    """Evaluate one bound against the experiment's moduli."""
    config = load_experiment(config_path)
    try:
        f = parse_fspec(fspec)
    except ValueError as err:
        raise click.BadParameter(str(err), param_hint="--fspec") from None
    try:
        value = calculus_for(config).named(name, k, f=f.fn, n=n, M=M, t=t)
    except ModuliError as err:
        raise ConfigFailure(str(err)) from None
    echo_csv(BOUND_COLUMNS, [(name, k, _describe_args(name, n, M, t, f), value)])
