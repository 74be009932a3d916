"""Running the iteration z_(n+1) = lambda u + gamma z + delta J_(c_n)(z) + e
and measuring the resulting trace against the quantitative statements about it.
"""
import csv
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from mppa.bounds import BudgetOverflow, Meter
from mppa.operators import as_point
from mppa.schedules import schedule_at

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ("n", "znorm_dist_s", "dz", "res_Jn", "res_J", "dist_target")


@dataclass
class IterationState:
    n: int
    z: np.ndarray
    trace: list = field(default_factory=list)

    @classmethod
    def start(cls, z0):
        z0 = as_point(z0)
        return cls(0, z0.copy(), [z0.copy()])


def update(op, u, z, lam, gamma, delta, c, e):
    """One mPPA update; returns (z_next, J_c(z)).

    Written as z + lam (u - z) + delta (J_c(z) - z) + e, which equals
    lam u + gamma z + delta J_c(z) + e and leaves a common zero u = z fixed.
    """
    jz = op.resolvent(c, z)
    return z + lam * (u - z) + delta * (jz - z) + e, jz


def _advance(state, op, schedule, u):
    p = schedule_at(schedule, state.n, op.dim)
    z_next, jz = update(op, u, state.z, float(p.lam), float(p.gamma), float(p.delta), float(p.c), p.e)
    state.trace.append(z_next)
    state.z = z_next
    state.n += 1
    return jz


def step(state, op, schedule, u):
    _advance(state, op, schedule, as_point(u, op.dim))
    return state


@dataclass
class Trace:
    op: object
    schedule: object
    u: np.ndarray
    points: np.ndarray
    jn_points: np.ndarray
    j_points: np.ndarray
    lams: np.ndarray
    gammas: np.ndarray
    cs: np.ndarray
    enorms: np.ndarray
    s: np.ndarray
    target: Optional[np.ndarray] = None
    c_lower: int = 1

    @property
    def horizon(self):
        return len(self.points) - 1

    @property
    def operator_id(self):
        return self.op.describe()

    @property
    def dz(self):
        """||z_(n+1) - z_n|| for n < horizon."""
        return np.linalg.norm(np.diff(self.points, axis=0), axis=1)

    @property
    def res_Jn(self):
        return np.linalg.norm(self.jn_points - self.points, axis=1)

    @property
    def res_J(self):
        return np.linalg.norm(self.j_points - self.points, axis=1)

    @property
    def dist_s(self):
        return np.linalg.norm(self.points - self.s, axis=1)

    @property
    def dist_target(self):
        if self.target is None:
            return None
        return np.linalg.norm(self.points - self.target, axis=1)

    @property
    def w(self):
        """w_n with z_(n+1) = gamma_n z_n + (1 - gamma_n) w_n, for n < horizon."""
        g = self.gammas[:-1, None]
        return (self.points[1:] - g * self.points[:-1]) / (1.0 - g)


def run(op, schedule, u, z0, horizon, s=None, target=None, c_lower=1):
    u = as_point(u, op.dim)
    state = IterationState.start(as_point(z0, op.dim))
    jn_points = []
    for _ in range(horizon):
        jn_points.append(_advance(state, op, schedule, u))
    last = schedule_at(schedule, horizon, op.dim)
    jn_points.append(op.resolvent(float(last.c), state.z))

    points = np.array(state.trace)
    params = [schedule_at(schedule, n, op.dim) for n in range(horizon + 1)]
    inverse_c = 1.0 / c_lower
    trace = Trace(
        op=op,
        schedule=schedule,
        u=u,
        points=points,
        jn_points=np.array(jn_points),
        j_points=np.array([op.resolvent(inverse_c, z) for z in points]),
        lams=np.array([float(p.lam) for p in params]),
        gammas=np.array([float(p.gamma) for p in params]),
        cs=np.array([float(p.c) for p in params]),
        enorms=np.array([schedule.error.norm_at(n) for n in range(horizon + 1)]),
        s=op.zero_set_witness if s is None else as_point(s, op.dim),
        target=None if target is None else as_point(target, op.dim),
        c_lower=c_lower,
    )
    logger.debug("ran %s for %d steps", trace.operator_id, horizon)
    return trace


def _fmt(value):
    return "" if value is None or not np.isfinite(value) else f"{value:.17g}"


def write_trace_csv(trace, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(TRACE_COLUMNS)
    dz = trace.dz
    res_jn, res_j, dist_s, dist_target = trace.res_Jn, trace.res_J, trace.dist_s, trace.dist_target
    for n in range(trace.horizon + 1):
        writer.writerow([
            n,
            _fmt(dist_s[n]),
            _fmt(dz[n] if n < trace.horizon else None),
            _fmt(res_jn[n]),
            _fmt(res_j[n]),
            _fmt(None if dist_target is None else dist_target[n]),
        ])


# -- empirical indices ------------------------------------------------------

def _window_length(f, n, budget):
    """f(n), or None when it cannot be evaluated within the budget."""
    meter = Meter(budget)
    try:
        return f.apply(n, meter)
    except BudgetOverflow:
        return None


def window_diameter_at_most(points, eps):
    """Whether every pair of rows of `points` lies within eps."""
    spread = points.max(axis=0) - points.min(axis=0)
    if float(np.max(spread)) > eps:
        return False
    if float(np.linalg.norm(spread)) <= eps:
        return True
    # the bounding box is inconclusive
    first = points[0]
    radius = float(np.max(np.linalg.norm(points - first, axis=1)))
    if radius <= eps / 2:
        return True
    if radius > eps:
        return False
    for i in range(len(points) - 1):
        if float(np.max(np.linalg.norm(points[i + 1:] - points[i], axis=1))) > eps:
            return False
    return True


def empirical_metastability(trace, k, f, budget=None):
    """Least n with n + f(n) <= horizon whose window [n, n + f(n)] has diameter <= 1/(k+1)."""
    points = trace.points if isinstance(trace, Trace) else np.asarray(trace, dtype=float)
    if points.ndim == 1:
        points = points[:, None]
    horizon = len(points) - 1
    eps = 1.0 / (k + 1)
    n = 0
    while n <= horizon:
        width = _window_length(f, n, budget)
        if width is None or n + width > horizon:
            return None
        if window_diameter_at_most(points[n:n + width + 1], eps):
            return n
        n += 1
    return None


def empirical_regularity(values, k, f, budget=None):
    """Least n with values[m] <= 1/(k+1) for every m in [n, n + f(n)] inside the column."""
    values = np.asarray(values, dtype=float)
    last = len(values) - 1
    bad = values > 1.0 / (k + 1)
    # next_bad[n]: first index >= n holding a value above the threshold
    next_bad = np.full(len(values) + 1, len(values))
    for i in range(last, -1, -1):
        next_bad[i] = i if bad[i] else next_bad[i + 1]
    for n in range(len(values)):
        width = _window_length(f, n, budget)
        if width is None or n + width > last:
            return None
        if next_bad[n] > n + width:
            return n
    return None


@dataclass(frozen=True)
class Residuals:
    dz: np.ndarray
    res_Jn: np.ndarray
    res_J: np.ndarray


def asymptotic_residuals(trace):
    """||z_(m+1) - z_m||, ||J_m(z_m) - z_m|| and ||J(z_m) - z_m|| with J = J_(1/c)."""
    return Residuals(trace.dz, trace.res_Jn, trace.res_J)


# -- diagnostics ------------------------------------------------------------

@dataclass(frozen=True)
class DiagnosticRow:
    m: int
    s: float
    v: float
    r: float
    gamma: float


def diagnostic_rows(trace, p, M1):
    p = as_point(p, trace.op.dim)
    u_p = trace.u - p
    norm_u_p = float(np.linalg.norm(u_p))
    rows = []
    for m in range(trace.horizon):
        dist = float(np.linalg.norm(trace.points[m] - p))
        jp = float(np.linalg.norm(trace.op.resolvent(trace.cs[m], p) - p))
        rows.append(DiagnosticRow(
            m=m,
            s=dist * dist,
            v=jp * (jp + 2.0 * dist),
            r=2.0 * float(np.dot(u_p, trace.points[m + 1] - p)),
            gamma=trace.enorms[m] * (M1 + 2.0 * trace.lams[m] * norm_u_p),
        ))
    return rows


def recurrence_check(trace, p, M1):
    """Max over m of s_(m+1) - [(1 - lambda_m)(s_m + v_m) + lambda_m r_m + gamma_m]."""
    rows = diagnostic_rows(trace, p, M1)
    if not rows:
        return 0.0
    worst = -np.inf
    for row, nxt in zip(rows, rows[1:] + [None]):
        s_next = float(np.linalg.norm(trace.points[row.m + 1] - p)) ** 2 if nxt is None else nxt.s
        lam = trace.lams[row.m]
        rhs = (1.0 - lam) * (row.s + row.v) + lam * row.r + row.gamma
        worst = max(worst, s_next - rhs)
    return float(worst)


def boundedness_check(trace, s, N0, slack=1e-9):
    dist = np.linalg.norm(trace.points - as_point(s, trace.op.dim), axis=1)
    return bool(np.all(dist <= N0 + slack))


def wbound_check(trace, s, a, N0, slack=1e-9):
    if trace.horizon == 0:
        return True
    dist = np.linalg.norm(trace.w - as_point(s, trace.op.dim), axis=1)
    return bool(np.all(dist <= 2 * a * N0 + slack))


def w_reconstruction_residual(trace):
    if trace.horizon == 0:
        return 0.0
    g = trace.gammas[:-1, None]
    rebuilt = g * trace.points[:-1] + (1.0 - g) * trace.w
    return float(np.max(np.linalg.norm(trace.points[1:] - rebuilt, axis=1)))


@dataclass(frozen=True)
class WdiffViolation:
    k: int
    n: int
    excess: float


def wdiff_check(trace, nu_values, slack=1e-9):
    """For each k -> nu(k), every n in [nu(k), horizon - 2] must satisfy
    ||w_(n+1) - w_n|| - ||z_(n+1) - z_n|| <= 1/(k+1)."""
    if trace.horizon < 2:
        return []
    w = trace.w
    gap = np.linalg.norm(np.diff(w, axis=0), axis=1) - trace.dz[:-1]
    violations = []
    for k, start in sorted(nu_values.items()):
        if start is None or start >= len(gap):
            continue
        over = np.nonzero(gap[start:] > 1.0 / (k + 1) + slack)[0]
        if over.size:
            n = start + int(over[0])
            violations.append(WdiffViolation(k, n, float(gap[n] - 1.0 / (k + 1))))
    return violations


def ineqjc_check(trace, c, N0):
    """Max of ||J_(m+1)(z_(m+1)) - J_m(z_m)|| - ||z_(m+1) - z_m|| - 2cN0|c_(m+1) - c_m|."""
    if trace.horizon == 0:
        return 0.0
    lhs = np.linalg.norm(np.diff(trace.jn_points, axis=0), axis=1)
    rhs = trace.dz + 2.0 * c * N0 * np.abs(np.diff(trace.cs))
    return float(np.max(lhs - rhs))
