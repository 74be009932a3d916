import pytest

from mppa.bounds import Affine, Const, Exact, Identity, is_exact
from mppa.calculus import BOUND_ARGS, BoundCalculus
from mppa.reference import toy_moduli
from mppa.schedules import Moduli

KS = range(21)


def exact_values(bound, ks=KS):
    values = [bound(k) for k in ks]
    assert all(is_exact(v) for v in values), values
    return [v.value for v in values]


def moduli_variants(moduli_a):
    return [
        moduli_a,
        toy_moduli(),
        Moduli(a=3, c=2, Cmaj=Const(1), ell=Affine(2, 1), L=Identity(), E=Identity(),
               N1=2, N2=1, N3=3, Gamma=Affine(1, 4)),
    ]


@pytest.mark.parametrize("constant_c", [True, False])
def test_nu_and_mu_monotone_in_k(moduli_a, constant_c):
    for moduli in moduli_variants(moduli_a):
        calc = BoundCalculus(moduli, constant_c=constant_c)
        for name in ("nu", "mu"):
            values = exact_values(getattr(calc, name))
            assert values == sorted(values), (name, moduli)


def test_experiment_a_hand_values(moduli_a):
    calc = BoundCalculus(moduli_a, constant_c=True)
    assert calc.nu(1) == Exact(416)
    assert calc.mu(0) == Exact(72)
    assert calc.R(1, 2) == Exact(80)
    assert calc.zeta(0, 5) == Exact(0)


def test_rate_variants_take_the_max_with_mu(moduli_a):
    calc = BoundCalculus(moduli_a, constant_c=True)
    assert calc.xi_rate(0, Const(3)) == calc.mu(1)
    assert calc.xi_rate(0, Const(10 ** 6)) == Exact(10 ** 6)
    assert calc.jn_rate(0, Const(3)) == calc.mu(0)
    assert calc.jn_rate(2, Identity()) == Exact(max(calc.mu(2).value, 2 * 2 * 3))


def test_counterfunction_bounds_monotone_on_toy_moduli():
    calc = BoundCalculus(toy_moduli(), constant_c=True)
    ks = range(6)
    for values in (
        exact_values(lambda k: calc.zeta(k, 3), ks),
        exact_values(lambda k: calc.sigma(k, 2), ks),
        exact_values(lambda k: calc.theta(k, 1, 1, Identity()), ks),
        exact_values(lambda k: calc.proj(k, Affine(1, 1)), ks),
    ):
        assert values == sorted(values)


def test_named_dispatch(moduli_a):
    calc = BoundCalculus(moduli_a, constant_c=True)
    assert calc.named("nu", 1) == calc.nu(1)
    assert calc.named("theta", 0, f=Identity(), M=0, t=1) == calc.theta(0, 0, 1, Identity())
    assert calc.named("zeta", 0, n=5) == Exact(0)
    assert set(BOUND_ARGS) >= {"nu", "mu", "chi0", "xi", "psi", "Psi", "Theta", "phi"}
    with pytest.raises(KeyError):
        calc.named("omega", 0)
