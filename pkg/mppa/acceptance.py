"""The acceptance suite run by `verify`: each criterion yields one row."""
import logging
from dataclasses import dataclass

import numpy as np

from mppa import bounds, experiment, oracle, reference
from mppa.bounds import Affine, Const, Identity, Table, is_exact
from mppa.calculus import BoundCalculus
from mppa.experiment import FAIL, PASS, SKIP, VIOLATION
from mppa.iteration import empirical_regularity
from mppa.operators import BallProjection, sample_points
from mppa.schedules import Moduli

logger = logging.getLogger(__name__)

CRITERIA_COLUMNS = ("criterion", "status", "detail")
REGULARITY_KS = range(10)
PROJECTION_CS = (0.1, 1.0, 10.0)
PROJECTION_RADIUS = 0.1
ORACLE_TRIALS = {"ratap": 1000, "limsup2": 1000, "xu": 100, "suzuki2": 100}
MONOTONE_KS = range(6)
FSPEC_CHAIN = (Const(0), Const(3), Affine(1, 3), Affine(2, 3))
HAND_VALUES = (
    ("sigma(0,0;id,1)", lambda: bounds.sigma(0, 0, Identity(), 1), 3),
    ("theta(0,0,1,1,id)", lambda: bounds.theta(0, 0, 1, 1, Identity()), 2),
    ("R(2,0,1)", lambda: bounds.R_const(2, 0, 1), 6),
    ("zeta(1,3;2,n+1)", lambda: bounds.zeta(1, 3, 2, Affine(1, 1)), 15),
)


@dataclass(frozen=True)
class Criterion:
    criterion: str
    status: str
    detail: str = ""


def _status(ok):
    return PASS if ok else FAIL


def strong_convergence(result):
    """Boundedness, trend towards the nearest zero, no metastability violation."""
    bounded = result.check("boundedness").status == PASS
    trend = result.check("convergence_trend")
    violations = sum(row.verdict == VIOLATION for row in result.metastability)
    ok = bounded and trend.status != FAIL and not violations
    return Criterion("1", _status(ok), f"boundedness {result.check('boundedness').status}, "
                                       f"trend {trend.status}, {violations} metastability violation(s)")


def projection(config, result, seed):
    if not isinstance(config.op, BallProjection):
        return Criterion("2", SKIP, "operator is not a ball projection")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for x in sample_points(rng, config.op.dim, 100):
        outputs = [config.op.resolvent(c, x) for c in PROJECTION_CS]
        worst = max(worst, max(float(np.linalg.norm(y - outputs[0])) for y in outputs))
    dist = result.trace.dist_target
    hits = np.nonzero(dist <= PROJECTION_RADIUS)[0]
    ok = worst <= 1e-10 and hits.size > 0
    reached = f"first n with ||z_n - target|| <= {PROJECTION_RADIUS}: {int(hits[0]) if hits.size else 'none'}"
    return Criterion("2", _status(ok), f"c-independence residual {worst:.3g}; {reached}")


def diagnostics(result):
    names = ("recurrence", "ineqJc", "wdiff")
    rows = [result.check(name) for name in names]
    return Criterion("3", _status(all(row.status == PASS for row in rows)),
                     "; ".join(f"{row.check} {row.status} ({row.detail})" for row in rows))


def regularity(result):
    columns = result.trace.dz, result.trace.res_Jn, result.trace.res_J
    missing = [k for k in REGULARITY_KS
               if any(empirical_regularity(values, k, Const(0)) is None for values in columns)]
    violations = sum(row.verdict == VIOLATION for row in result.regularity)
    return Criterion("4", _status(not missing and not violations),
                     f"residuals below 1/(k+1) within the horizon for k in 0..{REGULARITY_KS[-1]}"
                     + (f" except k={missing}" if missing else "") + f"; {violations} bound violation(s)")


def oracle_suites(seed):
    results = [oracle.run_suite(lemma, seed, trials) for lemma, trials in ORACLE_TRIALS.items()]
    return Criterion("5", _status(all(r.ok for r in results)),
                     "; ".join(f"{r.lemma} {r.passed}/{r.trials}" for r in results))


def reference_equivalence():
    battery = reference.toy_battery()
    outcomes = {inst.label: reference.compare(inst) for inst in battery}
    disagree = [label for label, outcome in outcomes.items() if outcome == reference.DIFFER]
    exceeded = [label for label, outcome in outcomes.items() if outcome == reference.BOTH_EXCEED]
    matched = len(battery) - len(disagree) - len(exceeded)
    wrong = []
    for label, compute, expected in HAND_VALUES:
        got = compute()
        if not (is_exact(got) and got.value == expected):
            wrong.append(f"{label}={got}")
    nu_moduli = Moduli(a=1, c=1, Cmaj=Const(1), ell=Identity(), L=Identity(), E=Identity(),
                       N1=1, N2=1, N3=1)
    nu0 = BoundCalculus(nu_moduli, constant_c=True).nu(0)
    if not (is_exact(nu0) and nu0.value == 32):
        wrong.append(f"nu(0)={nu0}")
    detail = f"{matched}/{len(battery)} toy instances agree exactly"
    if exceeded:
        detail += f" (beyond budget on both sides: {', '.join(exceeded)})"
    if disagree:
        detail += f" (differ: {', '.join(disagree)})"
    if wrong:
        detail += f"; hand values off: {', '.join(wrong)}"
    return Criterion("6", _status(matched == len(battery) and not wrong), detail)


def _monotone(values):
    exact = [v.value for v in values if is_exact(v)]
    return all(a <= b for a, b in zip(exact, exact[1:]))


def monotonicity():
    calc = BoundCalculus(reference.toy_moduli(), constant_c=True)
    broken = []
    per_k = {
        "zeta": lambda k: calc.zeta(k, 3),
        "sigma": lambda k: calc.sigma(k, 2),
        "theta": lambda k: calc.theta(k, 1, 1, Identity()),
        "R": lambda k: calc.R(k, 2),
        "nu": calc.nu,
        "mu": calc.mu,
        "chi0": lambda k: calc.chi0(k, Const(0)),
        "proj": lambda k: calc.proj(k, Affine(1, 1)),
        "proj3": lambda k: calc.proj3(k, Const(0)),
    }
    for name, fn in per_k.items():
        if not _monotone([fn(k) for k in MONOTONE_KS]):
            broken.append(f"{name} in k")
    for name in ("theta", "chi0", "proj"):
        for k in (0, 1):
            values = [calc.named(name, k, f=f, M=1, t=1) for f in FSPEC_CHAIN]
            if not _monotone(values):
                broken.append(f"{name} in f at k={k}")
    table = Table((3, 1, 2, 5))
    for k in (0, 1):
        if calc.phi(k, table) != calc.phi(k, bounds.majorize(table)):
            broken.append(f"phi majorant at k={k}")
    return Criterion("7", _status(not broken), "; ".join(broken) or "all bounds monotone")


def run_acceptance(config, tol, seed, report=None):
    result = experiment.execute(config, tol, report)
    rows = [
        strong_convergence(result),
        projection(config, result, seed),
        diagnostics(result),
        regularity(result),
        oracle_suites(seed),
        reference_equivalence(),
        monotonicity(),
    ]
    logger.info("acceptance on %s: %d/%d criteria passed", config.name,
                sum(row.status == PASS for row in rows), len(rows))
    return rows
