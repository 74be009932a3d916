"""Exact evaluation of the metastability bound calculus.

Every value here is a Python int. Functions of naturals are CountFn objects,
all monotone by construction. Evaluation runs under a Meter that counts
calls and caps magnitudes; a budget overflow is returned as BudgetExceeded
carrying the innermost formula that ran out, never raised to the caller.

Functionals that take a counterfunction (theta, psi, Theta, ...) come in two
flavours: `<name>_value(meter, ...)` works inside an evaluation and returns
an int, `<name>(...)` opens its own meter and returns a BoundValue.
"""
import logging
from contextlib import contextmanager
from dataclasses import dataclass, field

import mpmath
from mpmath import iv
from mpmath.libmp import round_ceiling, round_floor, to_int

from mppa.errors import ModuliError

logger = logging.getLogger(__name__)

DEFAULT_MAX_BITS = 4096
DEFAULT_MAX_CALLS = 10_000_000
GUARD_BITS = 64


@dataclass(frozen=True)
class Budget:
    max_bits: int = DEFAULT_MAX_BITS
    max_calls: int = DEFAULT_MAX_CALLS


class BudgetOverflow(Exception):
    """Raised inside an evaluation; turned into BudgetExceeded at the edge."""

    def __init__(self, stage):
        super().__init__(stage)
        self.stage = stage


class Meter:
    def __init__(self, budget=None):
        self.budget = budget or Budget()
        self.calls = 0
        self._stages = []

    @property
    def current_stage(self):
        return self._stages[-1] if self._stages else "eval"

    @contextmanager
    def stage(self, name):
        self._stages.append(name)
        try:
            yield self
        finally:
            self._stages.pop()

    def charge(self, calls=1):
        self.calls += calls
        if self.calls > self.budget.max_calls:
            raise BudgetOverflow(self.current_stage)

    def check(self, value):
        if value.bit_length() > self.budget.max_bits:
            raise BudgetOverflow(self.current_stage)
        return value

    def check_bits(self, estimated_bits):
        """Reject before computing a value known to be about this large."""
        if estimated_bits > self.budget.max_bits + 1:
            raise BudgetOverflow(self.current_stage)


# -- bound values -----------------------------------------------------------

@dataclass(frozen=True)
class Exact:
    value: int

    def __str__(self):
        return str(self.value)


@dataclass(frozen=True)
class BudgetExceeded:
    stage: str

    def __str__(self):
        return f"BUDGET_EXCEEDED({self.stage})"


def is_exact(bound):
    return isinstance(bound, Exact)


def measure(stage, compute, budget=None):
    meter = Meter(budget)
    try:
        with meter.stage(stage):
            value = meter.check(compute(meter))
    except BudgetOverflow as err:
        logger.debug("%s: budget exceeded in %s after %d calls", stage, err.stage, meter.calls)
        return BudgetExceeded(err.stage)
    logger.debug("%s: exact after %d calls", stage, meter.calls)
    return Exact(value)


# -- exact e^m comparisons --------------------------------------------------

# floor(log2(e) * 10**16) / 10**16, just under log2(e)
LOG2_E = (14426950408889634, 10 ** 16)


@contextmanager
def _interval_precision(bits):
    saved = iv.prec
    iv.prec = bits
    try:
        yield
    finally:
        iv.prec = saved


def _exp_bits(n):
    """A lower estimate of the bit length of e^n."""
    num, den = LOG2_E
    return n * num // den


def _exp_interval(scale, n, bits):
    """Raw (lo, hi) endpoints of an interval holding scale * e^n."""
    with _interval_precision(bits):
        return (iv.exp(iv.mpf(n)) * scale)._mpi_


def _exp_at_least(m, x):
    """Decide e^m >= x for naturals m and x."""
    if m == 0:
        return x <= 1
    bits = max(x.bit_length(), _exp_bits(m)) + GUARD_BITS
    while True:
        lo, hi = _exp_interval(1, m, bits)
        if to_int(lo, round_ceiling) >= x:
            return True
        if to_int(hi, round_floor) < x:
            return False
        bits *= 2


def ceil_ln(x):
    """Least m >= 0 with e^m >= x."""
    if x < 1:
        raise ValueError(f"ceil_ln needs x >= 1, got {x}")
    if x == 1:
        return 0
    m = max(int(mpmath.ceil(mpmath.log(x))), 0)
    while not _exp_at_least(m, x):
        m += 1
    while m > 0 and _exp_at_least(m - 1, x):
        m -= 1
    return m


def ceil_exp(scale, n):
    """ceil(scale * e^n), exact."""
    if scale == 0:
        return 0
    if n == 0:
        return scale
    bits = _exp_bits(n) + scale.bit_length() + GUARD_BITS
    while True:
        lo, hi = _exp_interval(scale, n, bits)
        floor_lo = to_int(lo, round_floor)
        if floor_lo == to_int(hi, round_floor):
            # scale * e^n is irrational for n >= 1
            return floor_lo + 1
        bits *= 2


# -- counting functions -----------------------------------------------------

class CountFn:
    """A monotone function N -> N evaluated under a Meter."""

    monotone = True

    def apply(self, n, meter):
        meter.charge()
        return meter.check(self._apply(n, meter))

    def _apply(self, n, meter):
        raise NotImplementedError

    def __call__(self, n, budget=None):
        return evaluate(self, n, budget)


@dataclass(frozen=True)
class Const(CountFn):
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ModuliError(f"constant must be a natural, got {self.value}")

    def _apply(self, n, meter):
        return self.value


@dataclass(frozen=True)
class Identity(CountFn):
    def _apply(self, n, meter):
        return n


@dataclass(frozen=True)
class Affine(CountFn):
    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 0:
            raise ModuliError(f"affine coefficients must be naturals, got {self.a}, {self.b}")

    def _apply(self, n, meter):
        return self.a * n + self.b


@dataclass(frozen=True)
class Table(CountFn):
    """Finite table extended by its last value; stores the running maximum."""

    raw: tuple
    values: tuple = field(init=False, repr=False)

    def __post_init__(self):
        raw = tuple(int(v) for v in self.raw)
        if not raw:
            raise ModuliError("table needs at least one value")
        if any(v < 0 for v in raw):
            raise ModuliError("table values must be naturals")
        running, top = [], raw[0]
        for v in raw:
            top = max(top, v)
            running.append(top)
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "values", tuple(running))

    @property
    def was_monotone(self):
        return self.raw == self.values

    def _apply(self, n, meter):
        return self.values[min(n, len(self.values) - 1)]


@dataclass(frozen=True)
class Max(CountFn):
    parts: tuple

    def _apply(self, n, meter):
        return max(part.apply(n, meter) for part in self.parts)


@dataclass(frozen=True)
class Composed(CountFn):
    outer: CountFn
    inner: CountFn

    def _apply(self, n, meter):
        return self.outer.apply(self.inner.apply(n, meter), meter)


@dataclass(frozen=True)
class Iterated(CountFn):
    fn: CountFn
    times: int

    def _apply(self, n, meter):
        meter.charge(self.times)
        x = n
        for _ in range(self.times):
            x = self.fn.apply(x, meter)
        return x


@dataclass(frozen=True)
class CeilExp(CountFn):
    """n -> ceil(scale * e^n)."""

    scale: int

    def _apply(self, n, meter):
        meter.check_bits(_exp_bits(n) + self.scale.bit_length())
        return ceil_exp(self.scale, n)


@dataclass(frozen=True, eq=False)
class Closure(CountFn):
    """A bound formula with its parameters captured; fn(n, meter) -> int."""

    name: str
    fn: object
    is_monotone: bool = True

    @property
    def monotone(self):
        return self.is_monotone

    def _apply(self, n, meter):
        with meter.stage(self.name):
            return self.fn(n, meter)


@dataclass(frozen=True)
class Majorant(CountFn):
    fn: CountFn

    def _apply(self, n, meter):
        meter.charge(n + 1)
        return max(self.fn.apply(i, meter) for i in range(n + 1))


def evaluate(f, n, budget=None):
    return measure("eval", lambda meter: f.apply(n, meter), budget)


def iterate(f, r):
    if r == 0:
        return Identity()
    if r == 1:
        return f
    return Iterated(f, r)


def majorize(f):
    if isinstance(f, Table):
        return Table(f.values)
    if f.monotone:
        return f
    return Majorant(f)


def plus(f, b):
    """m -> f(m) + b."""
    return Composed(Affine(1, b), f)


# -- formula functionals ----------------------------------------------------

def zeta_value(meter, k, n, c, cmaj):
    bound = cmaj.apply(n, meter)
    if bound < 1 or c < 1:
        raise ModuliError("zeta needs c >= 1 and Cmaj(n) >= 1")
    return bound * c * (k + 1) - 1


def proj_value(meter, k, f, N):
    with meter.stage("proj"):
        return iterate(f, N * N * (k + 1)).apply(0, meter)


def _square_window(N):
    return lambda m: 24 * N * (m + 1) ** 2


def proj3_value(meter, k, f, N):
    with meter.stage("proj3"):
        q = _square_window(N)

        def fcheck(m, mt):
            qm = mt.check(q(m))
            return max(f.apply(qm, mt), qm)

        x = iterate(Closure("proj3", fcheck), 4 * N ** 4 * (k + 1) ** 2).apply(0, meter)
        return q(x)


def theta_value(meter, k, M, t, N, f):
    if t < 1 or N < 1:
        raise ModuliError(f"theta needs t >= 1 and N >= 1, got t={t}, N={N}")
    with meter.stage("theta"):
        P = N * (k + 1)
        meter.charge(P)
        r = 0
        for i in range(P - 1, -1, -1):
            r = meter.check(t + r + f.apply(M + (i + 1) * t + r, meter))
        return M + (P - 1) * t + r


def R_const_value(meter, a, k, t):
    if a < 1 or t < 1:
        raise ModuliError(f"R needs a >= 1 and t >= 1, got a={a}, t={t}")
    with meter.stage("R"):
        meter.check_bits((a.bit_length() - 1) * t)
        return t * (2 * t + 1) * a ** t * (k + 1)


def varphi_value(meter, k, f, l, t, a, nu, N):
    with meter.stage("varphi"):
        r = R_const_value(meter, a, k, t) - 1
        M = max(a, l, nu.apply(r, meter))
        return theta_value(meter, r, M, t, N, plus(f, t))


def chi_tilde_value(meter, k, f, a, nu, N):
    if N < 1:
        raise ModuliError("chi_tilde needs N >= 1")
    with meter.stage("chi_tilde"):
        t = max(2 * N * a * (k + 1), 1)
        return varphi_value(meter, k, f, a, t, a, nu, 2 * N)


def sigma_value(meter, k, n, L, D):
    if D < 1:
        raise ModuliError("sigma needs D >= 1")
    with meter.stage("sigma"):
        return L.apply(n + ceil_ln(4 * D * (k + 1)), meter) + 1


def f_tilde(mu_k, f):
    """m -> mu(k) + f(max(mu(k), m))."""
    return Closure("f_tilde", lambda m, meter: mu_k + f.apply(max(mu_k, m), meter))


def xi_value(meter, k, f, mu, chi, a):
    with meter.stage("xi"):
        mu_k = mu.apply(2 * k + 1, meter)
        return max(mu_k, chi(meter, 4 * a * (k + 1), f_tilde(mu_k, f)))


def jn_value(meter, k, f, mu, chi, a):
    """Bound for the J_{c_m} residual: max(mu(k), chi(2a(k+1), f~_k))."""
    with meter.stage("jn"):
        mu_k = mu.apply(k, meter)
        return max(mu_k, chi(meter, 2 * a * (k + 1), f_tilde(mu_k, f)))


def psi_value(meter, k, f, N, xi):
    if N < 1:
        raise ModuliError("psi needs N >= 1")
    with meter.stage("psi"):
        q = _square_window(N)
        f1 = plus(f, 1)

        def gcheck(m, mt):
            qm = mt.check(q(m))
            return max(f.apply(xi(mt, qm, f1), mt), qm)

        x = iterate(Closure("psi", gcheck), N ** 4 * (k + 1) ** 2).apply(0, meter)
        return xi(meter, meter.check(q(x)), f1)


def Psi_value(meter, k, f, N, c, cmaj, psi):
    with meter.stage("Psi"):
        def h(m, mt):
            fm = f.apply(m, mt)
            return zeta_value(mt, (1 + 4 * N) * (fm + 1) - 1, fm, c, cmaj)

        return psi(meter, 2 * k + 1, Closure("Psi", h))


def Theta_value(meter, k, f, L, Psi, G, D):
    if D < 1:
        raise ModuliError("Theta needs D >= 1")
    with meter.stage("Theta"):
        log_term = ceil_ln(4 * D * (k + 1))
        floor_index = G.apply(4 * k + 3, meter) + 1

        def h(m):
            return max(m, floor_index) + log_term

        def g(m, mt):
            return 4 * (k + 1) * (f.apply(L.apply(h(m), mt) + 1, mt) + 1)

        return L.apply(h(Psi(meter, 4 * k + 3, Closure("Theta", g))), meter) + 1


def phi_chi_value(meter, k, f, L, Psi, G, N):
    with meter.stage("phi"):
        window = Closure("phi", lambda m, mt: m + f.apply(m, mt))
        return Theta_value(meter, 4 * (k + 1) ** 2 - 1, window, L, Psi, G, 4 * N * N)


# -- public entry points ----------------------------------------------------

def zeta(k, n, c, cmaj, budget=None):
    return measure("zeta", lambda m: zeta_value(m, k, n, c, cmaj), budget)


def proj_bound(k, f, N, budget=None):
    if N < 1:
        raise ModuliError("proj needs N >= 1")
    return measure("proj", lambda m: proj_value(m, k, f, N), budget)


def proj3_bound(k, f, N, budget=None):
    if N < 1:
        raise ModuliError("proj3 needs N >= 1")
    return measure("proj3", lambda m: proj3_value(m, k, f, N), budget)


def theta(k, M, t, N, f, budget=None):
    return measure("theta", lambda m: theta_value(m, k, M, t, N, f), budget)


def R_const(a, k, t, budget=None):
    return measure("R", lambda m: R_const_value(m, a, k, t), budget)


def varphi_suzuki1(k, f, l, t, a, nu, N, budget=None):
    return measure("varphi", lambda m: varphi_value(m, k, f, l, t, a, nu, N), budget)


def chi_tilde(k, f, a, nu, N, budget=None):
    if N < 1:
        raise ModuliError("chi_tilde needs N >= 1")
    return measure("chi_tilde", lambda m: chi_tilde_value(m, k, f, a, nu, N), budget)


def sigma(k, n, L, D, budget=None):
    return measure("sigma", lambda m: sigma_value(m, k, n, L, D), budget)


def xi(k, f, mu, chi, a, budget=None):
    return measure("xi", lambda m: xi_value(m, k, f, mu, chi, a), budget)


def psi(k, f, N, xi_fn, budget=None):
    return measure("psi", lambda m: psi_value(m, k, f, N, xi_fn), budget)


def Psi(k, f, N, c, cmaj, psi_fn, budget=None):
    return measure("Psi", lambda m: Psi_value(m, k, f, N, c, cmaj, psi_fn), budget)


def Theta(k, f, L, Psi_fn, G, D, budget=None):
    return measure("Theta", lambda m: Theta_value(m, k, f, L, Psi_fn, G, D), budget)


def phi_chi(k, f, L, Psi_fn, G, N, budget=None):
    return measure("phi", lambda m: phi_chi_value(m, k, f, L, Psi_fn, G, N), budget)


def qtxu_sigma_window(k, n, p, L, D, budget=None):
    """Indices [sigma(k, n), p] on which the Xu-type conclusion is asserted.

    A sigma too large to evaluate exceeds any p, so the window is empty.
    """
    bound = sigma(k, n, L, D, budget)
    if not is_exact(bound):
        return range(0)
    return range(bound.value, p + 1)
