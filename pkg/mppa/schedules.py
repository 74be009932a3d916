"""Parameter sequences of the multi-parameter proximal point iteration and
the quantitative moduli that describe them.

lambda, gamma and c are exact Fractions; delta is always 1 - lambda - gamma.
Every family here is nonincreasing in n, so range checks at n = 0 cover the
whole schedule.
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import accumulate
from typing import Optional

import numpy as np

from mppa import bounds
from mppa.bounds import Closure, CountFn, Exact, measure
from mppa.errors import ModuliError, ScheduleError

logger = logging.getLogger(__name__)

# the (Q1)-(Q6) conditions; a violation of any of them aborts a run
BLOCKING_CONDITIONS = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6")
MAX_VIOLATIONS_PER_CONDITION = 10


def _fraction(text):
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as err:
        raise ValueError(f"'{text.strip()}' is not a rational number") from err


@dataclass(frozen=True)
class ConstantFamily:
    value: Fraction

    def at(self, n):
        return self.value

    @property
    def spec(self):
        return f"constant {self.value}"


@dataclass(frozen=True)
class HarmonicFamily:
    """n -> 1 / (n + shift)."""

    shift: int

    def __post_init__(self):
        if self.shift < 1:
            raise ScheduleError(f"harmonic shift must be >= 1, got {self.shift}", index=0)

    def at(self, n):
        return Fraction(1, n + self.shift)

    @property
    def spec(self):
        return f"harmonic {self.shift}"


@dataclass(frozen=True)
class ShiftedFamily:
    """n -> base + 1 / (n + shift)."""

    base: Fraction
    shift: int

    def __post_init__(self):
        if self.shift < 1 or self.base < 0:
            raise ScheduleError("shifted family needs base >= 0 and shift >= 1", index=0)

    def at(self, n):
        return self.base + Fraction(1, n + self.shift)

    @property
    def spec(self):
        return f"shifted {self.base} {self.shift}"


@dataclass(frozen=True)
class ZeroError:
    def at(self, n, dim):
        return np.zeros(dim)

    def norm_at(self, n):
        return 0.0

    @property
    def spec(self):
        return "zero"


@dataclass(frozen=True)
class GeometricError:
    """n -> rho^n v."""

    rho: float
    vector: tuple

    def __post_init__(self):
        if not self.rho >= 0:
            raise ScheduleError(f"geometric ratio must be >= 0, got {self.rho}", index=0)

    def at(self, n, dim):
        if len(self.vector) != dim:
            raise ScheduleError(f"error vector has dimension {len(self.vector)}, expected {dim}", index=n)
        return self.rho ** n * np.asarray(self.vector, dtype=float)

    def norm_at(self, n):
        return self.rho ** n * float(np.linalg.norm(self.vector))

    @property
    def spec(self):
        return f"geometric {self.rho!r} " + ",".join(repr(float(v)) for v in self.vector)


def parse_family(text):
    words = text.split()
    if not words:
        raise ValueError("empty family")
    kind, args = words[0], words[1:]
    if kind == "constant" and len(args) == 1:
        return ConstantFamily(_fraction(args[0]))
    if kind == "harmonic" and len(args) == 1:
        return HarmonicFamily(int(args[0]))
    if kind == "shifted" and len(args) == 2:
        return ShiftedFamily(_fraction(args[0]), int(args[1]))
    raise ValueError(f"unknown family '{text.strip()}' (constant V | harmonic Q | shifted B Q)")


def parse_error_family(text):
    words = text.split(None, 2)
    if words == ["zero"]:
        return ZeroError()
    if len(words) == 3 and words[0] == "geometric":
        vector = tuple(float(v) for v in words[2].split(","))
        return GeometricError(float(words[1]), vector)
    raise ValueError(f"unknown error family '{text.strip()}' (zero | geometric RHO v1,v2,...)")


@dataclass(frozen=True)
class Schedule:
    lam: object
    gamma: object
    c: object
    error: object = ZeroError()

    @property
    def constant_c(self):
        return isinstance(self.c, ConstantFamily)

    def check(self):
        """Raise ScheduleError unless every index gives a valid step."""
        lam, gamma = self.lam.at(0), self.gamma.at(0)
        if not 0 < lam < 1:
            raise ScheduleError(f"lambda_0 = {lam} is not in (0, 1)", index=0)
        if not 0 < gamma < 1:
            raise ScheduleError(f"gamma_0 = {gamma} is not in (0, 1)", index=0)
        if lam + gamma >= 1:
            raise ScheduleError(f"lambda_0 + gamma_0 = {lam + gamma} leaves delta_0 <= 0", index=0)
        if not self.c.at(0) > 0:
            raise ScheduleError("c_0 must be positive", index=0)
        return self

    def describe(self):
        return f"lambda={self.lam.spec};gamma={self.gamma.spec};c={self.c.spec};error={self.error.spec}"


@dataclass(frozen=True)
class Step:
    lam: Fraction
    gamma: Fraction
    delta: Fraction
    c: Fraction
    e: np.ndarray


def schedule_at(schedule, n, dim=1):
    lam, gamma, c = schedule.lam.at(n), schedule.gamma.at(n), schedule.c.at(n)
    delta = 1 - lam - gamma
    for name, value in (("lambda", lam), ("gamma", gamma), ("delta", delta)):
        if not 0 < value < 1:
            raise ScheduleError(f"{name}_{n} = {value} is not in (0, 1)", index=n)
    if not c > 0:
        raise ScheduleError(f"c_{n} = {c} is not positive", index=n)
    return Step(lam, gamma, delta, c, schedule.error.at(n, dim))


@dataclass(frozen=True)
class Moduli:
    a: int
    c: int
    Cmaj: CountFn
    ell: CountFn
    L: CountFn
    E: CountFn
    N1: int
    N2: int
    N3: int
    Gamma: Optional[CountFn] = None

    def __post_init__(self):
        for name in ("a", "c", "N1", "N2", "N3"):
            if getattr(self, name) < 1:
                raise ModuliError(f"{name} must be a positive integer, got {getattr(self, name)}")


@dataclass(frozen=True)
class BoundContext:
    N0: int
    N: int
    M1: int
    M2: int
    D: int
    G: CountFn = field(repr=False)


def derive_constants(moduli):
    N0 = moduli.N2 + moduli.N3
    N = max(2 * moduli.N3, N0)
    M1 = 3 * moduli.N2 + 4 * N
    M2 = M1 + 2 * (moduli.N3 + N)
    G = bounds.Composed(moduli.E, bounds.Affine(M2, M2))
    return BoundContext(N0=N0, N=N, M1=M1, M2=M2, D=4 * N * N, G=G)


def nu_fn(moduli, constant_c):
    m = moduli
    N0 = derive_constants(m).N0
    spread = N0 + m.N1 + m.N3
    if constant_c:
        def value(k, meter):
            return max(m.ell.apply(8 * m.a * spread * (k + 1), meter),
                       m.E.apply(4 * m.a * (k + 1), meter) + 1)
    else:
        if m.Gamma is None:
            raise ModuliError("Gamma is required for a non-constant c schedule")

        def value(k, meter):
            return max(m.Gamma.apply(10 * m.a * m.c * N0 * (k + 1), meter),
                       m.ell.apply(10 * m.a * spread * (k + 1), meter),
                       m.E.apply(5 * m.a * (k + 1), meter) + 1)
    return Closure("nu", value)


def mu_fn(moduli):
    m = moduli
    N0 = derive_constants(m).N0

    def value(k, meter):
        return max(m.ell.apply(4 * m.a * (k + 1) * (N0 + m.N3), meter),
                   m.E.apply(4 * m.a * (k + 1), meter) + 1)
    return Closure("mu", value)


def nu(moduli, k, constant_c, budget=None):
    fn = nu_fn(moduli, constant_c)
    return measure("nu", lambda meter: fn.apply(k, meter), budget)


def mu(moduli, k, budget=None):
    fn = mu_fn(moduli)
    return measure("mu", lambda meter: fn.apply(k, meter), budget)


# -- validation -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    condition: str
    index: Optional[int]
    k: Optional[int]
    detail: str

    def __str__(self):
        where = []
        if self.k is not None:
            where.append(f"k={self.k}")
        if self.index is not None:
            where.append(f"n={self.index}")
        return f"{self.condition}[{','.join(where)}]: {self.detail}"


@dataclass
class ModuliReport:
    horizon: int
    violations: list = field(default_factory=list)

    @property
    def blocking(self):
        return [v for v in self.violations if v.condition in BLOCKING_CONDITIONS]

    @property
    def constants(self):
        return [v for v in self.violations if v.condition not in BLOCKING_CONDITIONS]

    @property
    def ok(self):
        return not self.violations

    def summary(self):
        if self.ok:
            return f"all moduli conditions hold up to n={self.horizon}"
        return "; ".join(str(v) for v in self.violations)


def _within(fn, k, horizon, budget):
    """fn(k) if it is at most horizon, else None."""
    value = bounds.evaluate(fn, k, budget)
    if isinstance(value, Exact) and value.value <= horizon:
        return value.value
    return None


def _suffix_max(values):
    return list(accumulate(reversed(values), max))[::-1]


class _Collector:
    def __init__(self, report):
        self.report = report
        self.counts = {}

    def full(self, condition):
        return self.counts.get(condition, 0) >= MAX_VIOLATIONS_PER_CONDITION

    def add(self, condition, index, k, detail):
        self.counts[condition] = self.counts.get(condition, 0) + 1
        self.report.violations.append(Violation(condition, index, k, detail))


def validate_moduli(schedule, moduli, horizon, u=None, z0=None, s=None, slack=1e-9, budget=None):
    """Check (Q1)-(Q6), the majorant of c_n and N1..N3 up to `horizon`.

    Universal statements are checked for indices n <= horizon and for every k
    whose threshold index lies within the horizon.
    """
    m = moduli
    report = ModuliReport(horizon)
    out = _Collector(report)
    lams = [schedule.lam.at(n) for n in range(horizon + 1)]
    gammas = [schedule.gamma.at(n) for n in range(horizon + 1)]
    cs = [schedule.c.at(n) for n in range(horizon + 2)]
    enorms = [schedule.error.norm_at(n) for n in range(horizon + 1)]

    lam_tail = _suffix_max(lams)
    k = 0
    while not out.full("Q1"):
        start = _within(m.ell, k, horizon, budget)
        if start is None:
            break
        if lam_tail[start] > Fraction(1, k + 1):
            out.add("Q1", start, k, f"lambda reaches {float(lam_tail[start]):.6g} > 1/{k + 1} after n >= ell(k)")
        k += 1

    partial = [0.0] + list(accumulate(float(x) for x in lams[1:]))
    k = 0
    while not out.full("Q2"):
        end = _within(m.L, k, horizon, budget)
        if end is None:
            break
        if partial[end] < k - slack:
            out.add("Q2", end, k, f"sum of lambda_1..lambda_{end} is {partial[end]:.6g} < {k}")
        k += 1

    lo, hi = Fraction(1, m.a), 1 - Fraction(1, m.a)
    for n, g in enumerate(gammas):
        if out.full("Q3"):
            break
        if not lo <= g <= hi:
            out.add("Q3", n, None, f"gamma = {g} outside [1/{m.a}, 1 - 1/{m.a}]")

    floor_c = Fraction(1, m.c)
    for n, cn in enumerate(cs[:-1]):
        if out.full("Q4"):
            break
        if cn < floor_c:
            out.add("Q4", n, None, f"c = {cn} < 1/{m.c}")

    diffs = [abs(cs[n + 1] - cs[n]) for n in range(horizon + 1)]
    if any(diffs):
        if m.Gamma is None:
            out.add("Q5", None, None, "c_n varies but no Gamma modulus was given")
        else:
            diff_tail = _suffix_max(diffs)
            k = 0
            while not out.full("Q5"):
                start = _within(m.Gamma, k, horizon, budget)
                if start is None or diff_tail[start] == 0:
                    break
                if diff_tail[start] > Fraction(1, k + 1):
                    out.add("Q5", start, k, f"|c_(n+1) - c_n| reaches {float(diff_tail[start]):.6g} > 1/{k + 1}")
                k += 1

    tails = list(accumulate(reversed(enorms)))[::-1] + [0.0]
    k = 0
    while not out.full("Q6"):
        start = _within(m.E, k, horizon, budget)
        if start is None or start >= horizon or tails[start + 1] == 0:
            break
        if tails[start + 1] > 1.0 / (k + 1) + slack:
            out.add("Q6", start + 1, k, f"error tail after E(k) sums to {tails[start + 1]:.6g} > 1/{k + 1}")
        k += 1

    # c_n is nonincreasing and Cmaj monotone, so n = 0 decides c_n <= Cmaj(n)
    bound = bounds.evaluate(m.Cmaj, 0, budget)
    if isinstance(bound, Exact) and (bound.value < 1 or cs[0] > bound.value):
        out.add("Cmaj", 0, None, f"c_0 = {cs[0]} needs 1 <= c_0 <= Cmaj(0) = {bound.value}")

    _check_constants(out, schedule, m, u, z0, s, slack, budget)
    if report.violations:
        logger.info("moduli validation found %d violation(s) up to n=%d", len(report.violations), horizon)
    return report


def _check_constants(out, schedule, m, u, z0, s, slack, budget):
    if u is not None:
        norm_u = float(np.linalg.norm(u))
        if norm_u > m.N1 + slack:
            out.add("N1", None, None, f"||u|| = {norm_u:.6g} > N1 = {m.N1}")
    e0 = bounds.evaluate(m.E, 0, budget)
    if isinstance(e0, Exact):
        head = sum(schedule.error.norm_at(i) for i in range(e0.value + 1)) + 1
        if head > m.N2 + slack:
            out.add("N2", None, None, f"sum of ||e_i|| up to E(0) plus 1 is {head:.6g} > N2 = {m.N2}")
    if s is not None and u is not None and z0 is not None:
        spread = max(float(np.linalg.norm(u - s)), float(np.linalg.norm(z0 - s)))
        if spread > m.N3 + slack:
            out.add("N3", None, None, f"max(||u - s||, ||z0 - s||) = {spread:.6g} > N3 = {m.N3}")
