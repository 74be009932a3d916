"""A second, deliberately naive evaluator for the bound formulas.

Written directly from the displayed recursions with plain ints and plain
callables; it shares no code with mppa.bounds so the two can be compared
instance by instance. Limits mirror the production budget: a value beyond
4096 bits or a loop longer than 10**7 steps raises TooLarge.
"""
from dataclasses import dataclass
from typing import Callable

import mpmath

from mppa import bounds
from mppa.bounds import Affine, Const, Identity, is_exact
from mppa.calculus import BoundCalculus
from mppa.schedules import Moduli, mu as mu_bound, nu as nu_bound

MAX_BITS = 4096
MAX_LOOP = 10 ** 7


class TooLarge(Exception):
    pass


def _ok(value):
    if value.bit_length() > MAX_BITS:
        raise TooLarge(value.bit_length())
    return value


def _loop(length):
    if length > MAX_LOOP:
        raise TooLarge(length)
    return range(length)


def ref_ceil_ln(x):
    if x == 1:
        return 0
    with mpmath.workprec(x.bit_length() + 64):
        return int(mpmath.ceil(mpmath.log(x)))


def ref_iterate(g, times, start=0):
    x = start
    for _ in _loop(times):
        x = _ok(g(x))
    return x


def ref_zeta(k, n, c, cmaj):
    return _ok(cmaj(n) * c * (k + 1) - 1)


def ref_sigma(k, n, L, D):
    return _ok(L(n + ref_ceil_ln(4 * D * (k + 1))) + 1)


def ref_proj(k, f, N):
    return ref_iterate(f, N * N * (k + 1))


def ref_proj3(k, f, N):
    def q(m):
        return _ok(24 * N * (m + 1) ** 2)

    x = ref_iterate(lambda m: max(f(q(m)), q(m)), 4 * N ** 4 * (k + 1) ** 2)
    return q(x)


def ref_theta(k, M, t, N, f):
    P = N * (k + 1)
    r = 0  # r_P
    for i in reversed(_loop(P)):
        n_next = M + (i + 1) * t
        r = _ok(t + r + _ok(f(_ok(n_next + r))))
    return _ok(M + (P - 1) * t + r)


def ref_R(a, k, t):
    if a > 1 and (a.bit_length() - 1) * t > MAX_BITS:
        raise TooLarge(t)
    return _ok(t * (2 * t + 1) * a ** t * (k + 1))


def ref_varphi(k, f, l, t, a, nu, N):
    R = ref_R(a, k, t)
    return ref_theta(R - 1, max(a, l, nu(R - 1)), t, N, lambda m: t + f(m))


def ref_chi_tilde(k, f, a, nu, N):
    t = max(2 * N * a * (k + 1), 1)
    return ref_varphi(k, f, a, t, a, nu, 2 * N)


def ref_nu_constant(k, a, N0, N1, N3, ell, E):
    return _ok(max(ell(8 * a * (N0 + N1 + N3) * (k + 1)), E(4 * a * (k + 1)) + 1))


def ref_mu(k, a, N0, N3, ell, E):
    return _ok(max(ell(4 * a * (k + 1) * (N0 + N3)), E(4 * a * (k + 1)) + 1))


def ref_xi(k, f, mu, chi, a):
    mu_k = mu(2 * k + 1)
    return max(mu_k, chi(4 * a * (k + 1), lambda m: mu_k + f(max(mu_k, m))))


def ref_psi(k, f, N, xi):
    def q(m):
        return _ok(24 * N * (m + 1) ** 2)

    f1 = lambda m: f(m) + 1  # noqa: E731
    x = ref_iterate(lambda m: max(f(xi(q(m), f1)), q(m)), N ** 4 * (k + 1) ** 2)
    return _ok(xi(q(x), f1))


def ref_Psi(k, f, N, c, cmaj, psi):
    return psi(2 * k + 1, lambda m: ref_zeta((1 + 4 * N) * (f(m) + 1) - 1, f(m), c, cmaj))


def ref_Theta(k, f, L, Psi, G, D):
    def h(m):
        return max(m, G(4 * k + 3) + 1) + ref_ceil_ln(4 * D * (k + 1))

    def g(m):
        return _ok(4 * (k + 1) * (f(L(h(m)) + 1) + 1))

    return _ok(L(h(Psi(4 * k + 3, g))) + 1)


def ref_phi_chi(k, f, L, Psi, G, N):
    return ref_Theta(4 * (k + 1) ** 2 - 1, lambda m: m + f(m), L, Psi, G, 4 * N * N)


# -- toy battery ------------------------------------------------------------

def toy_moduli():
    """a = c = 1, every rate 0 except L = id, N1 = N2 = N3 = 1."""
    return Moduli(a=1, c=1, Cmaj=Const(1), ell=Const(0), L=Identity(), E=Const(0),
                  N1=1, N2=1, N3=1, Gamma=Const(0))


class ToyChain:
    """Reference counterparts of BoundCalculus on the toy moduli."""

    def __init__(self):
        self.a, self.N1, self.N3 = 1, 1, 1
        self.N0 = 2
        self.chi_N = 2 * self.a * self.N0 + self.N1 + self.N3
        self.zero = lambda m: 0  # noqa: E731

    def nu(self, k):
        return ref_nu_constant(k, self.a, self.N0, self.N1, self.N3, self.zero, self.zero)

    def chi0(self, k, f):
        return ref_chi_tilde(k, f, self.a, self.nu, self.chi_N)


@dataclass(frozen=True)
class ToyInstance:
    label: str
    production: Callable
    reference: Callable


MATCH = "match"
BOTH_EXCEED = "both exceed"
DIFFER = "differ"


def compare(instance):
    """MATCH on equal exact values, BOTH_EXCEED when neither side fits the budget."""
    got = instance.production()
    try:
        want = instance.reference()
    except TooLarge:
        return DIFFER if is_exact(got) else BOTH_EXCEED
    return MATCH if is_exact(got) and got.value == want else DIFFER


def agrees(instance):
    return compare(instance) == MATCH


def _stub_xi(meter, k, f):
    return k + f.apply(k, meter)


def _ref_stub_xi(k, f):
    return k + f(k)


def _stub_psi(meter, k, f):
    return bounds.psi_value(meter, k, f, 1, _stub_xi)


def _ref_stub_psi(k, f):
    return ref_psi(k, f, 1, _ref_stub_xi)


def _stub_Psi(meter, k, f):
    return f.apply(k, meter)


def _ref_stub_Psi(k, f):
    return f(k)


def toy_battery():
    ident = lambda m: m  # noqa: E731
    zero = lambda m: 0  # noqa: E731
    succ = lambda m: m + 1  # noqa: E731
    calc = BoundCalculus(toy_moduli(), constant_c=True)
    chain = ToyChain()
    nu_moduli = Moduli(a=1, c=1, Cmaj=Const(1), ell=Identity(), L=Identity(), E=Identity(),
                       N1=1, N2=1, N3=1)
    mu_moduli = Moduli(a=1, c=1, Cmaj=Const(1), ell=Identity(), L=Identity(), E=Identity(),
                       N1=1, N2=1, N3=4)

    return [
        ToyInstance("theta(0,0,1,1,id)", lambda: bounds.theta(0, 0, 1, 1, Identity()),
                    lambda: ref_theta(0, 0, 1, 1, ident)),
        ToyInstance("theta(1,0,1,1,const 0)", lambda: bounds.theta(1, 0, 1, 1, Const(0)),
                    lambda: ref_theta(1, 0, 1, 1, zero)),
        ToyInstance("theta(3,5,2,2,affine 1 1)", lambda: bounds.theta(3, 5, 2, 2, Affine(1, 1)),
                    lambda: ref_theta(3, 5, 2, 2, succ)),
        ToyInstance("R(2,0,1)", lambda: bounds.R_const(2, 0, 1), lambda: ref_R(2, 0, 1)),
        ToyInstance("varphi(0,const 0,l=0,t=1,a=1,nu=0,N=1)",
                    lambda: bounds.varphi_suzuki1(0, Const(0), 0, 1, 1, Const(0), 1),
                    lambda: ref_varphi(0, zero, 0, 1, 1, zero, 1)),
        ToyInstance("varphi(1,id,l=2,t=2,a=2,nu=id,N=1)",
                    lambda: bounds.varphi_suzuki1(1, Identity(), 2, 2, 2, Identity(), 1),
                    lambda: ref_varphi(1, ident, 2, 2, 2, ident, 1)),
        ToyInstance("chi_tilde(0,const 0,a=1,nu=0,N=1)",
                    lambda: bounds.chi_tilde(0, Const(0), 1, Const(0), 1),
                    lambda: ref_chi_tilde(0, zero, 1, zero, 1)),
        ToyInstance("chi_tilde(1,const 3,a=1,nu=id,N=1)",
                    lambda: bounds.chi_tilde(1, Const(3), 1, Identity(), 1),
                    lambda: ref_chi_tilde(1, lambda m: 3, 1, ident, 1)),
        ToyInstance("zeta(1,3;2,n+1)", lambda: bounds.zeta(1, 3, 2, Affine(1, 1)),
                    lambda: ref_zeta(1, 3, 2, succ)),
        ToyInstance("sigma(0,0;id,1)", lambda: bounds.sigma(0, 0, Identity(), 1),
                    lambda: ref_sigma(0, 0, ident, 1)),
        ToyInstance("sigma(1,2;id,1)", lambda: bounds.sigma(1, 2, Identity(), 1),
                    lambda: ref_sigma(1, 2, ident, 1)),
        ToyInstance("proj(1,affine 1 1,2)", lambda: bounds.proj_bound(1, Affine(1, 1), 2),
                    lambda: ref_proj(1, succ, 2)),
        ToyInstance("proj3(0,const 0,1)", lambda: bounds.proj3_bound(0, Const(0), 1),
                    lambda: ref_proj3(0, zero, 1)),
        ToyInstance("proj3(0,affine 2 1,1)", lambda: bounds.proj3_bound(0, Affine(2, 1), 1),
                    lambda: ref_proj3(0, lambda m: 2 * m + 1, 1)),
        ToyInstance("nu constant c (0)", lambda: nu_bound(nu_moduli, 0, True),
                    lambda: ref_nu_constant(0, 1, 2, 1, 1, ident, ident)),
        ToyInstance("mu(0)", lambda: mu_bound(mu_moduli, 0),
                    lambda: ref_mu(0, 1, 5, 4, ident, ident)),
        ToyInstance("chi0(0,const 0)", lambda: calc.chi0(0, Const(0)),
                    lambda: chain.chi0(0, zero)),
        ToyInstance("chi0(0,id)", lambda: calc.chi0(0, Identity()), lambda: chain.chi0(0, ident)),
        ToyInstance("chi_tilde(1,id,a=1,nu=0,N=1)",
                    lambda: bounds.chi_tilde(1, Identity(), 1, Const(0), 1),
                    lambda: ref_chi_tilde(1, ident, 1, zero, 1)),
        ToyInstance("xi(1,id) with chi(k,f) = k + f(k)",
                    lambda: bounds.xi(1, Identity(), Const(3), _stub_xi, 1),
                    lambda: ref_xi(1, ident, lambda k: 3, _ref_stub_xi, 1)),
        ToyInstance("psi(0,const 0) with xi(k,f) = k + f(k)",
                    lambda: bounds.psi(0, Const(0), 1, _stub_xi),
                    lambda: ref_psi(0, zero, 1, _ref_stub_xi)),
        ToyInstance("Psi(0,const 0) over the stub psi",
                    lambda: bounds.Psi(0, Const(0), 1, 1, Const(1), _stub_psi),
                    lambda: ref_Psi(0, zero, 1, 1, lambda n: 1, _ref_stub_psi)),
        ToyInstance("Theta(0,const 0) with Psi(k,f) = f(k)",
                    lambda: bounds.Theta(0, Const(0), Identity(), _stub_Psi, Const(0), 1),
                    lambda: ref_Theta(0, zero, ident, _ref_stub_Psi, zero, 1)),
        ToyInstance("phi_chi(0,id) with Psi(k,f) = f(k)",
                    lambda: bounds.phi_chi(0, Identity(), Identity(), _stub_Psi, Const(0), 1),
                    lambda: ref_phi_chi(0, ident, ident, _ref_stub_Psi, zero, 1)),
        ToyInstance("Theta(1,id) with Psi(k,f) = f(k)",
                    lambda: bounds.Theta(1, Identity(), Identity(), _stub_Psi, Const(0), 1),
                    lambda: ref_Theta(1, ident, ident, _ref_stub_Psi, zero, 1)),
    ]
