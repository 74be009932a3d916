"""Finite-dimensional Hilbert space arithmetic and maximal monotone operators
given through their exact resolvents J_c = (I + cT)^{-1}.

Points are 1-d float64 numpy arrays. Every resolvent here is a closed form
or a direct linear solve, so the error term of an iteration is exactly the
one the experiment declares.
"""
import logging
import math
from abc import ABC, abstractmethod

import numpy as np

from mppa.errors import DimensionError, OperatorError

logger = logging.getLogger(__name__)

# symmetric part of a LinearPSD matrix may dip this far below zero
PSD_EIGEN_TOL = 1e-12


def as_point(coords, dim=None):
    x = np.asarray(coords, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise DimensionError(f"a point must be a non-empty vector, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise DimensionError("point has non-finite coordinates")
    if dim is not None and x.size != dim:
        raise DimensionError(f"expected dimension {dim}, got {x.size}")
    return x


def _check_same_dim(x, y):
    if x.shape != y.shape:
        raise DimensionError(f"dimension mismatch: {x.size} vs {y.size}")


def inner(x, y):
    x, y = as_point(x), as_point(y)
    _check_same_dim(x, y)
    return float(np.dot(x, y))


def norm(x):
    return math.sqrt(inner(x, x))


def distance(x, y):
    x, y = as_point(x), as_point(y)
    _check_same_dim(x, y)
    return float(np.linalg.norm(x - y))


class ResolventOperator(ABC):
    """A maximal monotone T on R^d, known through J_c and one zero s of T."""

    kind = None

    def __init__(self, dim, zero_set_witness):
        self.dim = dim
        self.zero_set_witness = as_point(zero_set_witness, dim)

    def resolvent(self, c, x):
        if not c > 0:
            raise OperatorError(f"resolvent parameter must be positive, got {c}")
        x = as_point(x, self.dim)
        return self._resolve(float(c), x)

    @abstractmethod
    def _resolve(self, c, x):
        ...

    @abstractmethod
    def nearest_zero(self, x):
        """Metric projection of x onto S = T^{-1}(0)."""

    @abstractmethod
    def params(self):
        """Constructor parameters, in config-file order."""

    def describe(self):
        parts = []
        for key, value in self.params().items():
            if isinstance(value, np.ndarray):
                value = "[" + " ".join(f"{v:.17g}" for v in value.ravel()) + "]"
            parts.append(f"{key}={value}")
        return f"{self.kind}(" + ",".join(parts) + ")"


class QuadraticProx(ResolventOperator):
    """T = subdifferential of f(z) = w/2 ||z - m||^2."""

    kind = "quadratic"

    def __init__(self, center, weight=1.0):
        center = as_point(center)
        if not weight > 0:
            raise OperatorError(f"quadratic weight must be positive, got {weight}")
        super().__init__(center.size, center)
        self.center = center
        self.weight = float(weight)

    def _resolve(self, c, x):
        cw = c * self.weight
        return (x + cw * self.center) / (1.0 + cw)

    def nearest_zero(self, x):
        as_point(x, self.dim)
        return self.center.copy()

    def params(self):
        return {"center": self.center, "weight": self.weight}


class BallProjection(ResolventOperator):
    """T = normal cone of a closed ball; J_c is the projection for every c."""

    kind = "ball"

    def __init__(self, center, radius=1.0):
        center = as_point(center)
        if not radius > 0:
            raise OperatorError(f"ball radius must be positive, got {radius}")
        super().__init__(center.size, center)
        self.center = center
        self.radius = float(radius)

    def _resolve(self, c, x):
        d = x - self.center
        r = float(np.linalg.norm(d))
        if r <= self.radius:
            return x.copy()
        return self.center + d * (self.radius / r)

    def nearest_zero(self, x):
        return self._resolve(1.0, as_point(x, self.dim))

    def params(self):
        return {"center": self.center, "radius": self.radius}


class BoxProjection(ResolventOperator):
    """T = normal cone of the box [lo, hi]."""

    kind = "box"

    def __init__(self, lo, hi):
        lo = as_point(lo)
        hi = as_point(hi, lo.size)
        if np.any(lo > hi):
            raise OperatorError("box needs lo <= hi in every coordinate")
        super().__init__(lo.size, (lo + hi) / 2.0)
        self.lo = lo
        self.hi = hi

    def _resolve(self, c, x):
        return np.clip(x, self.lo, self.hi)

    def nearest_zero(self, x):
        return self._resolve(1.0, as_point(x, self.dim))

    def params(self):
        return {"lo": self.lo, "hi": self.hi}


class LinearPSD(ResolventOperator):
    """T(x) = Ax with A + A^T positive semidefinite; S = ker A."""

    kind = "linear"

    def __init__(self, matrix):
        a = np.asarray(matrix, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise DimensionError(f"linear operator needs a square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise OperatorError("matrix has non-finite entries")
        sym = (a + a.T) / 2.0
        if np.linalg.eigvalsh(sym).min() < -PSD_EIGEN_TOL:
            raise OperatorError("matrix is not positive semidefinite, T would not be monotone")
        super().__init__(a.shape[0], np.zeros(a.shape[0]))
        self.matrix = a
        self._identity = np.eye(a.shape[0])

    def _resolve(self, c, x):
        try:
            return np.linalg.solve(self._identity + c * self.matrix, x)
        except np.linalg.LinAlgError as err:
            # I + cA is invertible for monotone A and c > 0
            raise OperatorError(f"singular resolvent system at c={c}") from err

    def nearest_zero(self, x):
        x = as_point(x, self.dim)
        _, s, vt = np.linalg.svd(self.matrix)
        cutoff = max(s.max(), 1.0) * 1e-12
        kernel = vt[s <= cutoff]
        return kernel.T @ (kernel @ x)

    def params(self):
        return {"matrix": self.matrix}


class Rotation2D(ResolventOperator):
    """T(x1, x2) = (-x2, x1): monotone, skew, not a subdifferential; S = {0}."""

    kind = "rotation"

    def __init__(self):
        super().__init__(2, np.zeros(2))

    def _resolve(self, c, x):
        det = 1.0 + c * c
        return np.array([x[0] + c * x[1], x[1] - c * x[0]]) / det

    def nearest_zero(self, x):
        as_point(x, self.dim)
        return np.zeros(2)

    def params(self):
        return {}


OPERATOR_KINDS = {
    cls.kind: cls for cls in (QuadraticProx, BallProjection, BoxProjection, LinearPSD, Rotation2D)
}


def make_operator(kind, **params):
    try:
        cls = OPERATOR_KINDS[kind]
    except KeyError:
        raise OperatorError(f"unknown operator kind '{kind}'") from None
    return cls(**params)


def resolvent(op, c, x):
    return op.resolvent(c, x)


def check_resolvent_identity(op, a, b, x):
    """Residual ||J_a(x) - J_b((b/a) x + (1 - b/a) J_a(x))||."""
    x = as_point(x, op.dim)
    ja = op.resolvent(a, x)
    ratio = b / a
    rhs = op.resolvent(b, ratio * x + (1.0 - ratio) * ja)
    return float(np.linalg.norm(ja - rhs))


def check_resolvent_scaling(op, a, b, x, slack=1e-8):
    if not 0 < a <= b:
        raise OperatorError(f"scaling check needs 0 < a <= b, got a={a}, b={b}")
    x = as_point(x, op.dim)
    lhs = float(np.linalg.norm(op.resolvent(a, x) - x))
    rhs = float(np.linalg.norm(op.resolvent(b, x) - x))
    return lhs <= 2.0 * rhs + slack


def check_nonexpansive(op, c, x, y, slack=1e-9):
    jx, jy = op.resolvent(c, x), op.resolvent(c, y)
    return float(np.linalg.norm(jx - jy)) <= float(np.linalg.norm(as_point(x) - as_point(y))) + slack


def check_firm_nonexpansive(op, c, x, y, slack=1e-8):
    x, y = as_point(x, op.dim), as_point(y, op.dim)
    d = op.resolvent(c, x) - op.resolvent(c, y)
    return float(np.dot(d, x - y)) >= float(np.dot(d, d)) - slack


def check_zero_transfer(op, c, parameters, cmaj_n, k, p, slack=1e-9):
    """Almost-zeros of J = J_{1/c} are almost-zeros of every J_{c_n'}.

    `parameters` are c_0..c_n, each in [1/c, cmaj_n]. Returns None when p is
    not close enough to a zero of J for the implication to apply.
    """
    p = as_point(p, op.dim)
    zeta = cmaj_n * c * (k + 1) - 1
    if float(np.linalg.norm(op.resolvent(1.0 / c, p) - p)) > 1.0 / (zeta + 1):
        return None
    eps = 1.0 / (k + 1)
    return all(float(np.linalg.norm(op.resolvent(cn, p) - p)) <= eps + slack for cn in parameters)


def sample_points(rng, dim, count, scale=5.0):
    return rng.normal(scale=scale, size=(count, dim))
