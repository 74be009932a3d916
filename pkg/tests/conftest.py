from fractions import Fraction
from pathlib import Path

import pytest

from mppa import create_app
from mppa.bounds import CeilExp, Const, Identity
from mppa.operators import QuadraticProx
from mppa.schedules import ConstantFamily, HarmonicFamily, Moduli, Schedule

EXPERIMENTS = Path(__file__).resolve().parent.parent / "experiments"


def experiment_text(name="experiment_a", **run):
    """A shipped experiment file with some [run] keys replaced."""
    text = (EXPERIMENTS / f"{name}.cfg").read_text(encoding="utf-8")
    head, _, tail = text.partition("[run]")
    keys = {}
    for line in tail.strip().splitlines():
        key, _, value = line.partition("=")
        keys[key.strip()] = value.strip()
    keys.update({key: str(value) for key, value in run.items()})
    return head + "[run]\n" + "".join(f"{key} = {value}\n" for key, value in keys.items())


@pytest.fixture
def app(tmp_path):
    return create_app({"TESTING": True, "OUTPUT_DIR": str(tmp_path / "out"), "LOG_LEVEL": "WARNING"})


@pytest.fixture
def runner(app):
    return app.test_cli_runner()


@pytest.fixture
def small_experiment(tmp_path):
    path = tmp_path / "small_a.cfg"
    path.write_text(experiment_text(horizon=300, k="0..2", f="const 0; id"), encoding="utf-8")
    return path


@pytest.fixture
def quadratic():
    return QuadraticProx([1.0, -1.0], 1.0)


@pytest.fixture
def schedule_a():
    return Schedule(HarmonicFamily(3), ConstantFamily(Fraction(1, 2)), ConstantFamily(1))


@pytest.fixture
def moduli_a():
    return Moduli(a=2, c=1, Cmaj=Const(1), ell=Identity(), L=CeilExp(4), E=Const(0),
                  N1=4, N2=1, N3=4, Gamma=Const(0))
