import pytest
from hypothesis import given
from hypothesis import strategies as st

from mppa import bounds, reference
from mppa.acceptance import reference_equivalence
from mppa.bounds import Identity, ceil_ln, is_exact
from mppa.reference import agrees, toy_battery

BATTERY = toy_battery()


def test_battery_size():
    assert len(BATTERY) >= 20


@pytest.mark.parametrize("instance", BATTERY, ids=lambda inst: inst.label)
def test_production_matches_reference(instance):
    assert agrees(instance), instance.label


@given(st.integers(min_value=1, max_value=10**12))
def test_ceil_ln_matches_log_reference(x):
    assert ceil_ln(x) == reference.ref_ceil_ln(x)


def test_reference_hand_values():
    assert reference.ref_sigma(0, 0, lambda m: m, 1) == 3
    assert reference.ref_theta(0, 0, 1, 1, lambda m: m) == 2
    assert reference.ref_R(2, 1, 2) == 80
    assert reference.ref_nu_constant(0, 1, 2, 1, 1, lambda m: m, lambda m: m) == 32


def test_reference_refuses_oversized_values():
    with pytest.raises(reference.TooLarge):
        reference.ref_R(2, 0, 5000)


def test_disagreement_is_detected():
    instance = reference.ToyInstance("off by one", lambda: bounds.sigma(0, 0, Identity(), 1), lambda: 4)
    assert not agrees(instance)
    assert is_exact(instance.production())


def test_battery_values_are_all_exact():
    assert {reference.compare(instance) for instance in BATTERY} == {reference.MATCH}


def test_overflow_on_both_sides_is_not_agreement():
    instance = reference.ToyInstance("R(2,0,5000)", lambda: bounds.R_const(2, 0, 5000),
                                     lambda: reference.ref_R(2, 0, 5000))
    assert reference.compare(instance) == reference.BOTH_EXCEED
    assert not agrees(instance)


def test_criterion_reports_exact_agreement():
    criterion = reference_equivalence()
    assert criterion.status == "PASS"
    assert criterion.detail.startswith(f"{len(BATTERY)}/{len(BATTERY)} toy instances agree exactly")
