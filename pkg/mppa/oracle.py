"""Brute-force checks of the combinatorial lemmas behind the bounds.

Each lemma promises a witness below a computable bound; here the least
witness is found by exhaustive search on a concrete finite instance so the
promise can fail visibly. Premises are checked before every search.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from mppa import bounds
from mppa.bounds import Const, Identity, Table, is_exact
from mppa.errors import PremiseError

logger = logging.getLogger(__name__)

LEMMAS = ("ratap", "limsup2", "xu", "suzuki1", "suzuki2")
NORM_SLACK = 1e-9


def _at(f, n):
    value = bounds.evaluate(f, n)
    if not is_exact(value):
        raise PremiseError(f"counterfunction too large to evaluate at {n}")
    return value.value


@dataclass(frozen=True)
class BoundedSeq:
    """Rationals in [0, N]; index i >= len repeats the last value."""

    values: tuple
    N: int

    def __post_init__(self):
        values = tuple(Fraction(v) for v in self.values)
        if not values:
            raise PremiseError("bounded sequence needs at least one value")
        if any(v < 0 or v > self.N for v in values):
            raise PremiseError(f"values must lie in [0, {self.N}]")
        object.__setattr__(self, "values", values)

    def at(self, i):
        return self.values[min(i, len(self.values) - 1)]

    def window_max(self, lo, hi):
        last = len(self.values) - 1
        if lo > last:
            return self.values[-1]
        top = max(self.values[lo:min(hi, last) + 1])
        return max(top, self.values[-1]) if hi > last else top


def ratap_witness(xs, k, n, f):
    """Least p < N(k+1) with some x_m >= p/(k+1) and all x_m <= (p+1)/(k+1) on [n, n+f(n)]."""
    top = xs.window_max(n, n + _at(f, n))
    for p in range(xs.N * (k + 1)):
        if top >= Fraction(p, k + 1) and top <= Fraction(p + 1, k + 1):
            return p
    return None


@dataclass(frozen=True)
class Witness:
    m: int
    p: int


def rationalapprox2_witness(xs, k, M, t, f, budget=None):
    """Least (m, p), m first, with m in [M, theta], x_(m+t) >= p/(k+1) and
    x_n <= (p+1)/(k+1) on [m, m + f(m)]."""
    if t < 1:
        raise PremiseError("t must be >= 1")
    bound = bounds.theta(k, M, t, xs.N, f, budget)
    if not is_exact(bound):
        raise PremiseError(f"theta is not computable here: {bound}")
    for m in range(M, bound.value + 1):
        top = xs.window_max(m, m + _at(f, m))
        lead = xs.at(m + t)
        for p in range(xs.N * (k + 1)):
            if lead >= Fraction(p, k + 1) and top <= Fraction(p + 1, k + 1):
                return Witness(m, p)
    return None


def qtxu1_check(s, v, r, gam, lam, L, D, k, n, p):
    """True iff s_m <= 1/(k+1) on [sigma(k, n), p]; None when a premise fails."""
    length = len(s)
    if not (len(v) == len(r) == len(gam) == len(lam) == length) or p >= length:
        return None
    if D < 1 or any(x < 0 or x > D for x in s) or any(g < 0 for g in gam):
        return None
    if any(not 0 < x < 1 for x in lam):
        return None
    quarter = Fraction(1, 4 * (k + 1))
    for m in range(n, p + 1):
        if v[m] > Fraction(1, 4 * (k + 1) * (p + 1)) or r[m] > quarter:
            return None
    if sum(gam[n:]) > quarter:
        return None
    for m in range(length - 1):
        if s[m + 1] > (1 - lam[m]) * (s[m] + v[m]) + lam[m] * r[m] + gam[m]:
            return None
    # L must be a divergence rate on the arguments sigma uses
    partial = [0]
    for x in lam[1:]:
        partial.append(partial[-1] + x)
    for j in range(n + bounds.ceil_ln(4 * D * (k + 1)) + 1):
        end = _at(L, j)
        if end >= length or partial[end] < j:
            return None
    window = bounds.qtxu_sigma_window(k, n, p, L, D)
    return all(s[m] <= Fraction(1, k + 1) for m in window)


@dataclass
class SyntheticPair:
    z: list
    w: list
    alpha: list
    a: int

    def gap(self, n):
        return float(np.linalg.norm(self.w[n] - self.z[n]))

    def __len__(self):
        return len(self.w)


def make_pair(w, alpha, z0, a):
    """z_(n+1) = alpha_n w_n + (1 - alpha_n) z_n; len(z) == len(w)."""
    w = [np.atleast_1d(np.asarray(x, dtype=float)) for x in w]
    z = [np.atleast_1d(np.asarray(z0, dtype=float))]
    for n in range(len(w) - 1):
        z.append(alpha[n] * w[n] + (1.0 - alpha[n]) * z[n])
    return SyntheticPair(z, w, list(alpha), a)


def _check_nu(pair, nu):
    if len(pair) < 2:
        return
    dw = [float(np.linalg.norm(pair.w[n + 1] - pair.w[n])) for n in range(len(pair) - 1)]
    dz = [float(np.linalg.norm(pair.z[n + 1] - pair.z[n])) for n in range(len(pair) - 1)]
    excess = [x - y for x, y in zip(dw, dz)]
    tail = list(np.maximum.accumulate(excess[::-1]))[::-1]
    k = 0
    while True:
        start = _at(nu, k)
        if start >= len(tail) or tail[start] <= 0:
            return
        if tail[start] > 1.0 / (k + 1) + NORM_SLACK:
            raise PremiseError(f"nu fails at k={k}: difference {tail[start]:.3g} after n={start}")
        k += 1


def _check_alpha(pair, both_sides):
    lo, hi = 1.0 / pair.a, 1.0 - 1.0 / pair.a
    for n in range(pair.a, len(pair)):
        if pair.alpha[n] > hi + NORM_SLACK or (both_sides and pair.alpha[n] < lo - NORM_SLACK):
            raise PremiseError(f"alpha_{n} = {pair.alpha[n]} outside its range")


def suzuki1_witness(pair, k, l, t, nu, N, f, budget=None):
    """Least (m, p) with m in [l, varphi(k, f)] and p < R(a, k, t) N satisfying
    the three conjuncts of the quantitative Suzuki lemma."""
    if t < 1:
        raise PremiseError("t must be >= 1")
    if any(pair.gap(n) > N + NORM_SLACK for n in range(len(pair))):
        raise PremiseError(f"||w_n - z_n|| exceeds N = {N}")
    _check_alpha(pair, both_sides=False)
    _check_nu(pair, nu)
    R = bounds.R_const(pair.a, k, t, budget)
    phi = bounds.varphi_suzuki1(k, f, l, t, pair.a, nu, N, budget)
    if not (is_exact(R) and is_exact(phi)):
        raise PremiseError("suzuki1 bound is not computable here")
    R, phi = R.value, phi.value
    if phi + t + _at(f, phi) >= len(pair):
        raise PremiseError(f"pair of length {len(pair)} does not cover the search range up to {phi}")
    eps = 1.0 / (k + 1)
    for m in range(l, phi + 1):
        window = max(pair.gap(n) for n in range(m, m + t + _at(f, m) + 1))
        p = max(0, int(np.ceil(R * window - 1 - NORM_SLACK * R)))
        if p >= R * N:
            continue
        head = float(np.linalg.norm(pair.w[m + t] - pair.z[m]))
        spread = 1.0 + sum(pair.alpha[m + i] for i in range(t))
        if (head - spread * (p + 1) / R >= -eps - NORM_SLACK
                and pair.gap(m + t) >= p / R - NORM_SLACK
                and window <= (p + 1) / R + NORM_SLACK):
            return Witness(m, p)
    return None


def suzuki2_index(pair, k, f, nu, N):
    """Least n with ||w_m - z_m|| <= 1/(k+1) for all m in [n, n + f(n)]."""
    if any(np.linalg.norm(x) > N + NORM_SLACK for x in pair.z + pair.w):
        raise PremiseError(f"||z_n|| or ||w_n|| exceeds N = {N}")
    _check_alpha(pair, both_sides=True)
    _check_nu(pair, nu)
    eps = 1.0 / (k + 1) + NORM_SLACK
    for n in range(len(pair)):
        end = n + _at(f, n)
        if end >= len(pair):
            return None
        if all(pair.gap(m) <= eps for m in range(n, end + 1)):
            return n
    return None


def geometric_gap_pair(N, length):
    """w = N, z_0 = 0, alpha = 1/2: ||w_n - z_n|| = N 2^-n."""
    return make_pair([[float(N)]] * length, [0.5] * length, [0.0], 2)


def geometric_gap_index(N, k):
    """ceil(log2(N(k+1)))."""
    return (N * (k + 1) - 1).bit_length()


# -- seeded suites ----------------------------------------------------------

@dataclass
class SuiteResult:
    lemma: str
    trials: int
    passed: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return self.passed == self.trials

    def record(self, trial, ok, detail=""):
        if ok:
            self.passed += 1
        else:
            self.failures.append((trial, detail))


def _random_fspec(rng):
    choice = int(rng.integers(0, 5))
    return Identity() if choice == 4 else Const(choice)


def _random_bounded_seq(rng, N):
    length = int(rng.integers(1, 16))
    values = []
    for _ in range(length):
        den = int(rng.integers(1, 7))
        values.append(Fraction(int(rng.integers(0, N * den + 1)), den))
    return BoundedSeq(tuple(values), N)


def _trial_ratap(rng, trial):
    N = int(rng.integers(1, 4))
    xs = _random_bounded_seq(rng, N)
    k, n, f = int(rng.integers(0, 5)), int(rng.integers(0, 11)), _random_fspec(rng)
    p = ratap_witness(xs, k, n, f)
    return p is not None, f"N={N} k={k} n={n} f={f} xs={[str(x) for x in xs.values]}"


def _trial_limsup2(rng, trial):
    N = int(rng.integers(1, 4))
    xs = _random_bounded_seq(rng, N)
    k, M, t = int(rng.integers(0, 3)), int(rng.integers(0, 6)), int(rng.integers(1, 4))
    f = _random_fspec(rng)
    detail = f"N={N} k={k} M={M} t={t} f={f} xs={[str(x) for x in xs.values]}"
    witness = rationalapprox2_witness(xs, k, M, t, f)
    theta = bounds.theta(k, M, t, N, f)
    return witness is not None and M <= witness.m <= theta.value, detail


def _trial_xu(rng, trial):
    k, n = int(rng.integers(0, 3)), int(rng.integers(0, 6))
    D = int(rng.integers(1, 5))
    length = 80
    lam = [Fraction(int(rng.integers(1, 4)), 4) for _ in range(length)]
    p = int(rng.integers(n, length))
    quarter = Fraction(1, 4 * (k + 1))
    vcap = Fraction(1, 4 * (k + 1) * (p + 1))
    v = [vcap * Fraction(int(rng.integers(0, 5)), 4) for _ in range(length)]
    r = [quarter * Fraction(int(rng.integers(0, 5)), 4) for _ in range(length)]
    gam = [quarter * Fraction(int(rng.integers(0, 5)), 4 * length) for _ in range(length)]
    s = [Fraction(int(rng.integers(0, 2 * D + 1)), 4)]
    for m in range(length - 1):
        rhs = (1 - lam[m]) * (s[m] + v[m]) + lam[m] * r[m] + gam[m]
        s.append(rhs * Fraction(int(rng.integers(0, 5)), 4))
    partial, table = Fraction(0), [0]
    for i in range(1, length):
        partial += lam[i]
        while partial >= len(table):
            table.append(i)
    L = Table(tuple(table))
    outcome = qtxu1_check(s, v, r, gam, lam, L, D, k, n, p)
    return outcome is True, f"k={k} n={n} p={p} D={D} outcome={outcome}"


def _trial_suzuki1(rng, trial):
    a, t = 2, 1
    k, l = int(rng.integers(0, 2)), int(rng.integers(0, 4))
    f = Const(int(rng.integers(0, 3)))
    settle = int(rng.integers(0, 6))
    base = rng.uniform(-1.0, 1.0, size=2)
    moves = [base + rng.uniform(-0.5, 0.5, size=2) for _ in range(settle)]
    length = 400
    w = moves + [base] * (length - settle)
    alpha = [float(rng.uniform(0.5, 0.5 + 1e-3)) if n < a else 0.5 for n in range(length)]
    pair = make_pair(w, alpha, rng.uniform(-1.0, 1.0, size=2), a)
    N = int(np.ceil(max(pair.gap(n) for n in range(length)))) or 1
    nu = Const(settle)
    witness = suzuki1_witness(pair, k, l, t, nu, N, f)
    phi = bounds.varphi_suzuki1(k, f, l, t, a, nu, N)
    detail = f"k={k} l={l} f={f} settle={settle} N={N}"
    return witness is not None and l <= witness.m <= phi.value, detail


def _suite_suzuki2(rng, trials, result):
    cache = {}
    for trial in range(trials):
        N, k = int(rng.integers(1, 4)), int(rng.integers(0, 4))
        f = Const(int(rng.integers(0, 4)))
        key = (N, k, f.value)
        if key not in cache:
            cache[key] = bounds.chi_tilde(k, f, 2, Const(0), N)
        bound = cache[key]
        pair = geometric_gap_pair(N, 64)
        index = suzuki2_index(pair, k, f, Const(0), N)
        expected = geometric_gap_index(N, k)
        ok = index == expected and (not is_exact(bound) or index <= bound.value)
        result.record(trial, ok, f"N={N} k={k} f={f} index={index} expected={expected} bound={bound}")


_TRIALS = {
    "ratap": _trial_ratap,
    "limsup2": _trial_limsup2,
    "xu": _trial_xu,
    "suzuki1": _trial_suzuki1,
}


def run_suite(lemma, seed, trials):
    if lemma not in LEMMAS:
        raise ValueError(f"unknown lemma '{lemma}'")
    rng = np.random.default_rng(seed)
    result = SuiteResult(lemma, trials)
    if lemma == "suzuki2":
        _suite_suzuki2(rng, trials, result)
    else:
        trial_fn = _TRIALS[lemma]
        for trial in range(trials):
            try:
                ok, detail = trial_fn(rng, trial)
            except PremiseError as err:
                ok, detail = False, f"premise check failed: {err}"
            result.record(trial, ok, detail)
    logger.info("oracle %s: %d/%d passed (seed %d)", lemma, result.passed, trials, seed)
    return result
