"""The bound calculus instantiated for one experiment's moduli.

chi is always chi0, the Suzuki-type functional built from nu; every
downstream bound (xi, psi, Psi, Theta, phi) is taken with that chi.
"""
import logging

from mppa import bounds
from mppa.bounds import majorize, measure
from mppa.schedules import derive_constants, mu_fn, nu_fn

logger = logging.getLogger(__name__)

# bound name -> extra arguments it needs besides k
BOUND_ARGS = {
    "zeta": ("n",),
    "sigma": ("n",),
    "theta": ("M", "t", "f"),
    "R": ("t",),
    "nu": (),
    "mu": (),
    "chi0": ("f",),
    "jn": ("f",),
    "jn_rate": ("f",),
    "xi": ("f",),
    "xi_rate": ("f",),
    "psi": ("f",),
    "Psi": ("f",),
    "Theta": ("f",),
    "phi_chi": ("f",),
    "phi": ("f",),
    "proj": ("f",),
    "proj3": ("f",),
}


class BoundCalculus:
    def __init__(self, moduli, constant_c, budget=None):
        self.moduli = moduli
        self.constant_c = constant_c
        self.budget = budget
        self.ctx = derive_constants(moduli)
        self.nu_fn = nu_fn(moduli, constant_c)
        self.mu_fn = mu_fn(moduli)
        # ||z_n||, ||w_n|| <= 2aN0 + N1 + N3
        self.chi_N = 2 * moduli.a * self.ctx.N0 + moduli.N1 + moduli.N3

    # meter-level functionals, passed to each other as chi / xi / psi / Psi

    def chi0_value(self, meter, k, f):
        return bounds.chi_tilde_value(meter, k, f, self.moduli.a, self.nu_fn, self.chi_N)

    def xi_value(self, meter, k, f):
        return bounds.xi_value(meter, k, f, self.mu_fn, self.chi0_value, self.moduli.a)

    def psi_value(self, meter, k, f):
        return bounds.psi_value(meter, k, f, self.ctx.N, self.xi_value)

    def Psi_value(self, meter, k, f):
        m = self.moduli
        return bounds.Psi_value(meter, k, f, self.ctx.N, m.c, m.Cmaj, self.psi_value)

    def phi_value(self, meter, k, f):
        return bounds.phi_chi_value(meter, k, majorize(f), self.moduli.L, self.Psi_value,
                                    self.ctx.G, self.ctx.N)

    # public bounds

    def _run(self, name, compute):
        value = measure(name, compute, self.budget)
        logger.debug("%s -> %s", name, value)
        return value

    def nu(self, k):
        return self._run("nu", lambda meter: self.nu_fn.apply(k, meter))

    def mu(self, k):
        return self._run("mu", lambda meter: self.mu_fn.apply(k, meter))

    def zeta(self, k, n):
        m = self.moduli
        return self._run("zeta", lambda meter: bounds.zeta_value(meter, k, n, m.c, m.Cmaj))

    def sigma(self, k, n):
        return self._run("sigma", lambda meter: bounds.sigma_value(meter, k, n, self.moduli.L, self.ctx.D))

    def theta(self, k, M, t, f):
        return self._run("theta", lambda meter: bounds.theta_value(meter, k, M, t, self.ctx.N, f))

    def R(self, k, t):
        return self._run("R", lambda meter: bounds.R_const_value(meter, self.moduli.a, k, t))

    def proj(self, k, f):
        return self._run("proj", lambda meter: bounds.proj_value(meter, k, f, self.ctx.N))

    def proj3(self, k, f):
        return self._run("proj3", lambda meter: bounds.proj3_value(meter, k, f, self.ctx.N))

    def chi0(self, k, f):
        """Bound for ||w_m - z_m|| and ||z_(m+1) - z_m|| on a window of length f."""
        return self._run("chi0", lambda meter: self.chi0_value(meter, k, f))

    def jn(self, k, f):
        """Bound for the J_(c_m) residual."""
        a = self.moduli.a
        return self._run("jn", lambda meter: bounds.jn_value(meter, k, f, self.mu_fn, self.chi0_value, a))

    def jn_rate(self, k, chi_rate):
        a = self.moduli.a
        return self._run("jn_rate", lambda meter: max(self.mu_fn.apply(k, meter),
                                                      chi_rate.apply(2 * a * (k + 1), meter)))

    def xi(self, k, f):
        return self._run("xi", lambda meter: self.xi_value(meter, k, f))

    def xi_rate(self, k, chi_rate):
        """Rate form of xi for a chi that does not depend on the counterfunction."""
        a = self.moduli.a
        return self._run("xi_rate", lambda meter: max(self.mu_fn.apply(2 * k + 1, meter),
                                                      chi_rate.apply(4 * a * (k + 1), meter)))

    def psi(self, k, f):
        return self._run("psi", lambda meter: self.psi_value(meter, k, f))

    def Psi(self, k, f):
        return self._run("Psi", lambda meter: self.Psi_value(meter, k, f))

    def Theta(self, k, f):
        m = self.moduli
        return self._run("Theta", lambda meter: bounds.Theta_value(meter, k, f, m.L, self.Psi_value,
                                                                   self.ctx.G, self.ctx.D))

    def phi_chi(self, k, f):
        m = self.moduli
        return self._run("phi", lambda meter: bounds.phi_chi_value(meter, k, f, m.L, self.Psi_value,
                                                                   self.ctx.G, self.ctx.N))

    def phi(self, k, f):
        return self._run("phi", lambda meter: self.phi_value(meter, k, f))

    def named(self, name, k, f=None, n=None, M=None, t=None):
        """Dispatch used by the `bound` command; arguments per BOUND_ARGS."""
        if name not in BOUND_ARGS:
            raise KeyError(name)
        if name in ("zeta", "sigma"):
            return getattr(self, name)(k, n)
        if name == "theta":
            return self.theta(k, M, t, f)
        if name == "R":
            return self.R(k, t)
        if name in ("nu", "mu"):
            return getattr(self, name)(k)
        return getattr(self, name)(k, f)
