"""One experiment end to end: validate the moduli, run the iteration, and
compare what the trace does with what the bounds promise."""
import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from mppa import iteration
from mppa.bounds import evaluate, is_exact
from mppa.calculus import BoundCalculus
from mppa.operators import (
    check_firm_nonexpansive,
    check_nonexpansive,
    check_resolvent_identity,
    check_resolvent_scaling,
    check_zero_transfer,
    sample_points,
)
from mppa.schedules import validate_moduli

logger = logging.getLogger(__name__)

CONSISTENT = "CONSISTENT"
VIOLATION = "VIOLATION"
BOUND_INCOMPUTABLE = "BOUND_INCOMPUTABLE"
NO_WITNESS_IN_HORIZON = "NO_WITNESS_IN_HORIZON"

PASS, FAIL, SKIP = "PASS", "FAIL", "SKIP"

METASTABILITY_COLUMNS = ("k", "f_spec", "empirical_index", "phi_bound", "verdict")
REGULARITY_COLUMNS = ("k", "f_spec", "residual", "empirical_index", "bound", "verdict")
CHECK_COLUMNS = ("check", "status", "detail")

WDIFF_KS = range(6)
IDENTITY_PARAMS = ((0.5, 1.0), (1.0, 2.0), (0.25, 4.0))
SAMPLE_COUNT = 100


@dataclass(frozen=True)
class Tolerances:
    identity: float = 1e-8
    slack: float = 1e-9


@dataclass(frozen=True)
class TableRow:
    k: int
    f_spec: str
    empirical_index: object
    bound: object
    verdict: str
    residual: str = ""


@dataclass(frozen=True)
class CheckRow:
    check: str
    status: str
    detail: str = ""


@dataclass
class RunReport:
    config: object
    trace: object
    validation: object
    metastability: list = field(default_factory=list)
    regularity: list = field(default_factory=list)
    checks: list = field(default_factory=list)

    @property
    def failed(self):
        return (any(row.verdict == VIOLATION for row in self.metastability + self.regularity)
                or any(row.status == FAIL for row in self.checks))

    def check(self, name):
        return next((row for row in self.checks if row.check == name), None)


def validate(config, tol=Tolerances()):
    return validate_moduli(config.schedule, config.moduli, config.horizon, u=config.u, z0=config.z0,
                           s=config.s, slack=tol.slack, budget=config.budget)


def calculus_for(config):
    return BoundCalculus(config.moduli, config.schedule.constant_c, config.budget)


def verdict(index, bound, f, last_index, budget):
    """Compare an empirical index with its bound.

    Without an empirical witness an Exact bound whose window still fits in
    the trace is itself a violation.
    """
    if not is_exact(bound):
        return BOUND_INCOMPUTABLE if index is not None else NO_WITNESS_IN_HORIZON
    if index is not None:
        return CONSISTENT if index <= bound.value else VIOLATION
    width = evaluate(f, bound.value, budget)
    if is_exact(width) and bound.value + width.value <= last_index:
        return VIOLATION
    return NO_WITNESS_IN_HORIZON


def metastability_table(trace, calc, ks, fspecs, budget):
    rows = []
    for k in ks:
        for spec in fspecs:
            index = iteration.empirical_metastability(trace, k, spec.fn, budget)
            bound = calc.phi(k, spec.fn)
            rows.append(TableRow(k, spec.text, index, bound, verdict(index, bound, spec.fn, trace.horizon, budget)))
    return rows


def regularity_table(trace, calc, ks, fspecs, budget):
    residuals = iteration.asymptotic_residuals(trace)
    columns = (("dz", residuals.dz, calc.chi0), ("res_Jn", residuals.res_Jn, calc.jn),
               ("res_J", residuals.res_J, calc.xi))
    rows = []
    for k in ks:
        for spec in fspecs:
            for name, values, bound_fn in columns:
                index = iteration.empirical_regularity(values, k, spec.fn, budget)
                bound = bound_fn(k, spec.fn)
                rows.append(TableRow(k, spec.text, index, bound,
                                     verdict(index, bound, spec.fn, len(values) - 1, budget), name))
    return rows


def _status(ok):
    return PASS if ok else FAIL


def operator_checks(op, c_values, seed, tol):
    rng = np.random.default_rng(seed)
    xs = sample_points(rng, op.dim, SAMPLE_COUNT)
    ys = sample_points(rng, op.dim, SAMPLE_COUNT)
    identity = max(check_resolvent_identity(op, a, b, x) for a, b in IDENTITY_PARAMS for x in xs)
    scaling = all(check_resolvent_scaling(op, a, b, x) for a, b in IDENTITY_PARAMS for x in xs)
    nonexp = all(check_nonexpansive(op, c, x, y, tol.slack) for c in c_values for x, y in zip(xs, ys))
    firm = all(check_firm_nonexpansive(op, c, x, y, tol.identity) for c in c_values for x, y in zip(xs, ys))
    return [
        CheckRow("resolvent_identity", _status(identity <= tol.identity), f"max residual {identity:.3g}"),
        CheckRow("resolvent_scaling", _status(scaling), f"{len(xs) * len(IDENTITY_PARAMS)} samples"),
        CheckRow("nonexpansive", _status(nonexp), f"c in {sorted(set(c_values))}"),
        CheckRow("firm_nonexpansive", _status(firm), f"c in {sorted(set(c_values))}"),
    ]


def trace_checks(config, trace, calc, report, tol):
    m, ctx = config.moduli, calc.ctx
    rows = []
    constants = report.constants
    rows.append(CheckRow("moduli_constants", _status(not constants),
                         "; ".join(str(v) for v in constants) or "N1, N2, N3 and Cmaj hold"))

    bounded = iteration.boundedness_check(trace, config.s, ctx.N0, tol.slack)
    rows.append(CheckRow("boundedness", _status(bounded),
                         f"max ||z_n - s|| = {float(trace.dist_s.max()):.6g}, N0 = {ctx.N0}"))
    rows.append(CheckRow("wbound", _status(iteration.wbound_check(trace, config.s, m.a, ctx.N0, tol.slack)),
                         f"bound 2aN0 = {2 * m.a * ctx.N0}"))
    rebuilt = iteration.w_reconstruction_residual(trace)
    rows.append(CheckRow("w_reconstruction", _status(rebuilt <= tol.identity), f"max residual {rebuilt:.3g}"))

    target = config.target_point
    recurrence = iteration.recurrence_check(trace, target, ctx.M1)
    rows.append(CheckRow("recurrence", _status(recurrence <= tol.identity), f"max violation {recurrence:.3g}"))
    jc = iteration.ineqjc_check(trace, m.c, ctx.N0)
    rows.append(CheckRow("ineqJc", _status(jc <= tol.identity), f"max violation {jc:.3g}"))

    nu_values = {}
    for k in WDIFF_KS:
        bound = calc.nu(k)
        nu_values[k] = bound.value if is_exact(bound) and bound.value <= trace.horizon else None
    wdiff = iteration.wdiff_check(trace, nu_values, tol.slack)
    rows.append(CheckRow("wdiff", _status(not wdiff),
                         "; ".join(f"k={v.k} n={v.n} excess {v.excess:.3g}" for v in wdiff)
                         or f"k in 0..{WDIFF_KS[-1]}"))

    n = min(trace.horizon, 10)
    cmaj = evaluate(m.Cmaj, n, config.budget)
    transfer = None
    if is_exact(cmaj):
        transfer = check_zero_transfer(config.op, m.c, [float(x) for x in trace.cs[:n + 1]], cmaj.value,
                                       0, target, tol.slack)
    rows.append(CheckRow("zero_transfer", SKIP if transfer is None else _status(transfer),
                         f"p = nearest zero to u, n <= {n}"))

    if trace.horizon >= 100:
        dist = trace.dist_target
        late, early = float(dist[trace.horizon]), float(dist[100])
        ok = late < early or late <= tol.identity
        rows.append(CheckRow("convergence_trend", _status(ok),
                             f"||z_n - target||: {early:.6g} at n=100, {late:.6g} at n={trace.horizon}"))
    else:
        rows.append(CheckRow("convergence_trend", SKIP, "horizon below 100"))

    rows += operator_checks(config.op, [float(trace.cs[0]), 1.0], config.seed, tol)
    return rows


def execute(config, tol=Tolerances(), report=None):
    """Run a validated experiment; raises nothing for property failures."""
    report = report or validate(config, tol)
    trace = iteration.run(config.op, config.schedule, config.u, config.z0, config.horizon,
                          s=config.s, target=config.target_point, c_lower=config.moduli.c)
    calc = calculus_for(config)
    result = RunReport(config, trace, report)
    if config.horizon == 0:
        logger.warning("%s: horizon 0, metastability and regularity tables are empty", config.name)
    else:
        result.metastability = metastability_table(trace, calc, config.ks, config.fspecs, config.budget)
        result.regularity = regularity_table(trace, calc, config.ks, config.fspecs, config.budget)
    result.checks = trace_checks(config, trace, calc, report, tol)
    incomputable = sum(row.verdict == BOUND_INCOMPUTABLE for row in result.metastability)
    if incomputable:
        logger.warning("%s: %d metastability bound(s) exceeded the evaluation budget", config.name, incomputable)
    return result


# -- files ------------------------------------------------------------------

def _cell(value):
    return "" if value is None else str(value)


def write_tables(result, out_dir):
    out = Path(out_dir) / result.config.name
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "trace.csv", "w", encoding="utf-8", newline="") as fh:
        iteration.write_trace_csv(result.trace, fh)
    with open(out / "metastability.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(METASTABILITY_COLUMNS)
        for row in result.metastability:
            writer.writerow([row.k, row.f_spec, _cell(row.empirical_index), _cell(row.bound), row.verdict])
    with open(out / "regularity.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(REGULARITY_COLUMNS)
        for row in result.regularity:
            writer.writerow([row.k, row.f_spec, row.residual, _cell(row.empirical_index), _cell(row.bound),
                             row.verdict])
    with open(out / "checks.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CHECK_COLUMNS)
        for row in result.checks:
            writer.writerow([row.check, row.status, row.detail])
    logger.info("wrote %s", out)
    return out
