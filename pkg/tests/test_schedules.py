from dataclasses import replace
from fractions import Fraction

import numpy as np
import pytest

from mppa.bounds import Const, Exact, Identity, is_exact
from mppa.errors import ModuliError, ScheduleError
from mppa.schedules import (
    ConstantFamily,
    GeometricError,
    HarmonicFamily,
    Moduli,
    Schedule,
    ShiftedFamily,
    ZeroError,
    derive_constants,
    mu,
    nu,
    parse_error_family,
    parse_family,
    schedule_at,
    validate_moduli,
)

U, Z0, S = np.array([3.0, 2.0]), np.array([0.0, 0.0]), np.array([1.0, -1.0])


def toy(**overrides):
    fields = dict(a=1, c=1, Cmaj=Const(1), ell=Identity(), L=Identity(), E=Identity(), N1=1, N2=1, N3=1)
    fields.update(overrides)
    return Moduli(**fields)


def conditions(report):
    return {v.condition for v in report.violations}


def test_parse_family():
    assert parse_family("harmonic 3") == HarmonicFamily(3)
    assert parse_family("constant 1/2") == ConstantFamily(Fraction(1, 2))
    assert parse_family("shifted 1 2") == ShiftedFamily(Fraction(1), 2)
    for bad in ("", "bogus 1", "constant x", "harmonic"):
        with pytest.raises(ValueError):
            parse_family(bad)
    with pytest.raises(ScheduleError):
        parse_family("harmonic 0")


def test_parse_error_family():
    assert parse_error_family("zero") == ZeroError()
    geometric = parse_error_family("geometric 0.5 1,0")
    assert geometric == GeometricError(0.5, (1.0, 0.0))
    assert geometric.norm_at(2) == 0.25
    np.testing.assert_array_equal(geometric.at(1, 2), [0.5, 0.0])
    with pytest.raises(ScheduleError):
        geometric.at(0, 3)


def test_schedule_at_exact_parameters(schedule_a):
    step = schedule_at(schedule_a, 0, 2)
    assert (step.lam, step.gamma, step.delta, step.c) == (Fraction(1, 3), Fraction(1, 2), Fraction(1, 6), 1)
    later = schedule_at(schedule_a, 7)
    assert later.lam + later.gamma + later.delta == 1
    assert later.lam == Fraction(1, 10)


def test_schedule_check_rejects_empty_delta():
    schedule = Schedule(ConstantFamily(Fraction(1, 2)), ConstantFamily(Fraction(1, 2)), ConstantFamily(1))
    with pytest.raises(ScheduleError) as err:
        schedule.check()
    assert err.value.index == 0
    with pytest.raises(ScheduleError):
        schedule_at(schedule, 0)


def test_describe(schedule_a):
    assert schedule_a.describe() == "lambda=harmonic 3;gamma=constant 1/2;c=constant 1;error=zero"
    assert schedule_a.constant_c


def test_derive_constants(moduli_a):
    ctx = derive_constants(moduli_a)
    assert (ctx.N0, ctx.N, ctx.M1, ctx.M2, ctx.D) == (5, 8, 35, 59, 256)


def test_nu_and_mu_hand_values(moduli_a):
    assert nu(toy(), 0, constant_c=True) == Exact(32)
    assert mu(toy(N3=4), 0) == Exact(36)
    assert nu(moduli_a, 2, constant_c=True) == Exact(208 * 3)
    assert mu(moduli_a, 0) == Exact(72)


def test_nu_for_varying_c_needs_gamma():
    with pytest.raises(ModuliError):
        nu(toy(), 0, constant_c=False)
    assert is_exact(nu(toy(Gamma=Identity()), 0, constant_c=False))


def test_nu_monotone_in_k(moduli_a):
    values = [nu(moduli_a, k, constant_c=True).value for k in range(21)]
    assert values == sorted(values)


def test_moduli_need_positive_constants():
    with pytest.raises(ModuliError):
        toy(a=0)


def test_experiment_a_moduli_hold(schedule_a, moduli_a):
    report = validate_moduli(schedule_a, moduli_a, 2000, u=U, z0=Z0, s=S)
    assert report.ok, report.summary()
    assert report.summary() == "all moduli conditions hold up to n=2000"


def test_rate_of_convergence_violation(schedule_a, moduli_a):
    report = validate_moduli(schedule_a, replace(moduli_a, ell=Const(0)), 200)
    q1 = [v for v in report.blocking if v.condition == "Q1"]
    assert q1 and q1[0].k == 3


def test_gamma_outside_band_blocks(moduli_a):
    schedule = Schedule(HarmonicFamily(3), ConstantFamily(Fraction(1, 3)), ConstantFamily(1))
    report = validate_moduli(schedule, moduli_a, 50)
    assert "Q3" in {v.condition for v in report.blocking}


def test_varying_c_needs_gamma_modulus(moduli_a):
    schedule = Schedule(HarmonicFamily(3), ConstantFamily(Fraction(1, 2)), ShiftedFamily(Fraction(1), 1))
    without = replace(moduli_a, Cmaj=Const(2), Gamma=None)
    assert "Q5" in conditions(validate_moduli(schedule, without, 100))
    with_gamma = replace(moduli_a, Cmaj=Const(2), Gamma=Identity())
    assert validate_moduli(schedule, with_gamma, 100).ok


def test_summable_errors_need_a_rate(moduli_a):
    schedule = Schedule(HarmonicFamily(3), ConstantFamily(Fraction(1, 2)), ConstantFamily(1),
                        GeometricError(0.5, (1.0, 0.0)))
    report = validate_moduli(schedule, moduli_a, 100)
    assert "Q6" in {v.condition for v in report.blocking}
    assert "N2" in {v.condition for v in report.constants}


def test_constants_do_not_block(schedule_a, moduli_a):
    report = validate_moduli(schedule_a, moduli_a, 100, u=U, z0=np.array([10.0, 10.0]), s=S)
    assert not report.blocking
    assert [v.condition for v in report.constants] == ["N3"]


def test_cmaj_must_cover_c(schedule_a, moduli_a):
    schedule = Schedule(HarmonicFamily(3), ConstantFamily(Fraction(1, 2)), ConstantFamily(3))
    report = validate_moduli(schedule, moduli_a, 10)
    assert "Cmaj" in conditions(report)
