import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mppa import bounds
from mppa.bounds import (
    Affine,
    Budget,
    BudgetExceeded,
    CeilExp,
    Closure,
    Const,
    Exact,
    Identity,
    Table,
    ceil_exp,
    ceil_ln,
    evaluate,
    is_exact,
    iterate,
    majorize,
)
from mppa.errors import ModuliError

small = st.integers(min_value=0, max_value=6)


def value(bound):
    assert is_exact(bound), bound
    return bound.value


@pytest.mark.parametrize("x, expected", [(1, 0), (2, 1), (3, 2), (4, 2), (7, 2), (8, 3), (21, 4), (1096, 7), (1097, 8)])
def test_ceil_ln_hand_values(x, expected):
    assert ceil_ln(x) == expected


@given(st.integers(min_value=2, max_value=10**6))
def test_ceil_ln_brackets_x(x):
    m = ceil_ln(x)
    assert math.exp(m - 1) < x <= math.exp(m)


def test_ceil_ln_rejects_below_one():
    with pytest.raises(ValueError):
        ceil_ln(0)


@pytest.mark.parametrize("scale, n, expected", [(4, 0, 4), (4, 1, 11), (4, 2, 30), (1, 3, 21), (0, 9, 0)])
def test_ceil_exp_hand_values(scale, n, expected):
    assert ceil_exp(scale, n) == expected


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=400))
def test_ceil_exp_brackets_e_power(n):
    upper = ceil_exp(1, n)
    assert ceil_ln(upper) == n + 1
    assert ceil_ln(upper - 1) == n


def test_ceil_exp_near_the_bit_cap():
    assert is_exact(evaluate(CeilExp(1), 2800))
    assert evaluate(CeilExp(1), 2800).value.bit_length() <= 4096
    assert not is_exact(evaluate(CeilExp(1), 2900))


def test_huge_ceilexp_argument_exceeds_budget():
    assert not is_exact(evaluate(CeilExp(4), 2 ** 1100))
    assert isinstance(bounds.sigma(0, 10 ** 400, CeilExp(4), 1), BudgetExceeded)
    huge_Psi = lambda meter, k, g: 2 ** 2000  # noqa: E731
    assert isinstance(bounds.Theta(0, Const(0), CeilExp(1), huge_Psi, Const(0), 1), BudgetExceeded)


def test_count_functions():
    assert evaluate(Const(3), 100) == Exact(3)
    assert evaluate(Identity(), 7) == Exact(7)
    assert evaluate(Affine(2, 1), 5) == Exact(11)
    assert evaluate(CeilExp(4), 1) == Exact(11)
    assert Table((1, 4))(10) == Exact(4)
    with pytest.raises(ModuliError):
        Const(-1)
    with pytest.raises(ModuliError):
        Table(())


def test_iterate():
    assert evaluate(iterate(Affine(1, 1), 3), 0) == Exact(3)
    assert evaluate(iterate(Affine(2, 0), 5), 1) == Exact(32)
    assert evaluate(iterate(Affine(2, 0), 0), 9) == Exact(9)


def test_majorize_table_keeps_running_maximum():
    table = Table((3, 1, 2, 5))
    assert not table.was_monotone
    assert majorize(table).values == (3, 3, 3, 5)
    assert majorize(Identity()) == Identity()
    assert majorize(Const(4)) == Const(4)


def test_majorize_non_monotone_closure():
    zigzag = Closure("zigzag", lambda n, meter: 5 if n == 1 else 0, is_monotone=False)
    top = majorize(zigzag)
    assert [value(evaluate(top, n)) for n in range(4)] == [0, 5, 5, 5]


def test_zeta_hand_values():
    assert value(bounds.zeta(0, 4, 1, Const(1))) == 0
    assert value(bounds.zeta(1, 3, 2, Affine(1, 1))) == 15
    assert value(bounds.zeta(9, 0, 1, Const(1))) == 9


def test_proj_hand_values():
    assert value(bounds.proj_bound(0, Identity(), 3)) == 0
    assert value(bounds.proj_bound(0, Affine(1, 1), 1)) == 1
    assert value(bounds.proj_bound(1, Affine(1, 1), 2)) == 8


def test_proj3_at_least_square_window():
    base = value(bounds.proj3_bound(0, Const(0), 1))
    assert base >= 24
    assert value(bounds.proj3_bound(0, Affine(2, 1), 1)) >= base
    # sixteen rounds of m -> 24(m+1)^2
    assert not is_exact(bounds.proj3_bound(1, Const(0), 1))


def test_theta_hand_values():
    assert value(bounds.theta(0, 0, 1, 1, Identity())) == 2
    assert value(bounds.theta(1, 0, 1, 1, Const(0))) == 3


@settings(max_examples=50, deadline=None)
@given(k=small, M=small, t=st.integers(min_value=1, max_value=4))
def test_theta_monotone_and_above_M(k, M, t):
    base = value(bounds.theta(k, M, t, 1, Affine(1, 1)))
    assert base >= M
    assert value(bounds.theta(k + 1, M, t, 1, Affine(1, 1))) >= base
    assert value(bounds.theta(k, M + 1, t, 1, Affine(1, 1))) >= base
    assert value(bounds.theta(k, M, t, 1, Affine(2, 1))) >= base


def test_R_hand_values():
    assert value(bounds.R_const(2, 0, 1)) == 6
    assert value(bounds.R_const(2, 1, 2)) == 80
    assert value(bounds.R_const(1, 0, 4)) == 4 * 9


def test_sigma_hand_values():
    assert value(bounds.sigma(0, 0, Identity(), 1)) == 3
    assert value(bounds.sigma(1, 2, Identity(), 1)) == 6
    assert value(bounds.sigma(5, 5, Const(0), 1)) == 1
    with pytest.raises(ModuliError):
        bounds.sigma(0, 0, Identity(), 0)


@settings(max_examples=50, deadline=None)
@given(k=small, n=small)
def test_sigma_monotone(k, n):
    base = value(bounds.sigma(k, n, Affine(2, 1), 16))
    assert value(bounds.sigma(k + 1, n, Affine(2, 1), 16)) >= base
    assert value(bounds.sigma(k, n + 1, Affine(2, 1), 16)) >= base


def test_qtxu_sigma_window():
    assert bounds.qtxu_sigma_window(0, 0, 10, Identity(), 1) == range(3, 11)
    assert len(bounds.qtxu_sigma_window(0, 0, 2, Identity(), 1)) == 0


def test_xi_dominates_mu():
    assert value(bounds.xi(0, Const(0), Const(5), lambda meter, k, f: 0, 1)) == 5
    chi = lambda meter, k, f: f.apply(0, meter)  # noqa: E731
    # f~(0) = mu + f(max(mu, 0)) = 5 + 5
    assert value(bounds.xi(0, Identity(), Const(5), chi, 1)) == 10


def test_Psi_feeds_zeta_into_psi():
    psi = lambda meter, k, f: f.apply(0, meter)  # noqa: E731
    assert value(bounds.Psi(0, Const(0), 1, 1, Const(1), psi)) == 4


def test_Theta_with_constant_moduli():
    assert value(bounds.Theta(0, Const(0), Const(0), lambda meter, k, g: 0, Const(0), 1)) == 1


def test_chi_tilde_needs_positive_N():
    with pytest.raises(ModuliError):
        bounds.chi_tilde(0, Const(0), 2, Const(0), 0)


def test_budget_exceeded_is_a_value():
    result = bounds.R_const(2, 0, 5000)
    assert isinstance(result, BudgetExceeded)
    assert str(result) == "BUDGET_EXCEEDED(R)"
    assert value(bounds.R_const(2, 0, 5000, Budget(max_bits=8192))) == 5000 * 10001 * 2 ** 5000


def test_call_budget():
    result = evaluate(iterate(Affine(1, 1), 1000), 0, Budget(max_calls=100))
    assert isinstance(result, BudgetExceeded)


@settings(max_examples=30, deadline=None)
@given(k=small, t=st.integers(min_value=1, max_value=6))
def test_bigger_budget_agrees_when_exact(k, t):
    small_budget = bounds.varphi_suzuki1(k, Const(0), 1, t, 2, Const(0), 1)
    big_budget = bounds.varphi_suzuki1(k, Const(0), 1, t, 2, Const(0), 1, Budget(max_bits=8192))
    if is_exact(small_budget):
        assert big_budget == small_budget
