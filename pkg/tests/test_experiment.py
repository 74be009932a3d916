import pytest

from mppa.bounds import BudgetExceeded, Const, Exact
from mppa.configfile import parse_config
from mppa.experiment import (
    BOUND_INCOMPUTABLE,
    CONSISTENT,
    NO_WITNESS_IN_HORIZON,
    PASS,
    VIOLATION,
    Tolerances,
    execute,
    operator_checks,
    verdict,
)

from tests.conftest import experiment_text


@pytest.mark.parametrize("index, bound, last, expected", [
    (3, Exact(5), 100, CONSISTENT),
    (5, Exact(5), 100, CONSISTENT),
    (6, Exact(5), 100, VIOLATION),
    (None, Exact(5), 100, VIOLATION),
    (None, Exact(5), 6, NO_WITNESS_IN_HORIZON),
    (3, BudgetExceeded("phi"), 100, BOUND_INCOMPUTABLE),
    (None, BudgetExceeded("phi"), 100, NO_WITNESS_IN_HORIZON),
])
def test_verdict(index, bound, last, expected):
    assert verdict(index, bound, Const(2), last, None) == expected


def test_operator_checks_pass_for_monotone_operator(quadratic):
    rows = operator_checks(quadratic, [1.0, 2.0], 7, Tolerances())
    assert [row.check for row in rows] == ["resolvent_identity", "resolvent_scaling", "nonexpansive",
                                           "firm_nonexpansive"]
    assert all(row.status == PASS for row in rows)


def test_execute_experiment_b():
    config = parse_config(experiment_text("experiment_b", horizon=500, k="0..1", f="const 0"), name="b")
    result = execute(config)
    assert result.check("boundedness").status == PASS
    assert result.check("recurrence").status == PASS
    assert not result.failed
    assert result.trace.dist_target[500] < result.trace.dist_target[0]
