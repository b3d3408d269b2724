"""Circulant metric g, its inverse, and the circulant affinor q with q^3 = id.

In coordinates the metric matrix has diagonal A and off-diagonal B, with
A > B > 0, and q permutes the coordinate basis cyclically,
e1 -> e2 -> e3 -> e1.  q is an isometry of every such metric.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .expr import Expr, as_expr, diff, evaluate
from .rng import as_rng

__all__ = [
    "Q", "Q_INT", "S",
    "DomainViolation", "ZeroVector", "SolveFailure", "AngleRangeWarning",
    "CirculantMetric", "MetricAtPoint",
    "metric_at", "apply_q", "inner", "angle_with_q", "q_independent",
    "orthonormal_q_base", "q_base",
]

# q_i^j: row i, column j; (qx)^j = x^i q_i^j.
Q_INT = np.array([[0, 1, 0], [0, 0, 1], [1, 0, 0]], dtype=np.int64)
Q = Q_INT.astype(float)

# grad A = grad B . S characterises a parallel q.
S = np.array([[-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]])

Q_INDEPENDENCE_RTOL = 1e-12


class DomainViolation(ValueError):
    """The point lies outside the region where the metric is defined."""


class ZeroVector(ValueError):
    pass


class SolveFailure(RuntimeError):
    pass


class AngleRangeWarning(UserWarning):
    """angle(x, qx) fell outside (0, 2pi/3)."""


@dataclass(frozen=True)
class CirculantMetric:
    """The pair of scalar fields (A, B) plus extra strict-positivity constraints.

    Every expression in ``constraints`` must evaluate > 0 where the metric is
    used; A > B > 0 is always enforced on top of them.
    """

    A: Expr
    B: Expr
    constraints: tuple[Expr, ...] = field(default=())

    @classmethod
    def from_strings(cls, A: str, B: str, constraints: Sequence[str] = ()) -> "CirculantMetric":
        return cls(as_expr(A), as_expr(B), tuple(as_expr(c) for c in constraints))

    @cached_property
    def grad_exprs(self) -> tuple[tuple[Expr, ...], tuple[Expr, ...]]:
        return (tuple(diff(self.A, i) for i in (1, 2, 3)),
                tuple(diff(self.B, i) for i in (1, 2, 3)))

    @cached_property
    def hessian_exprs(self) -> tuple[tuple[tuple[Expr, ...], ...], tuple[tuple[Expr, ...], ...]]:
        dA, dB = self.grad_exprs

        def hess(d):
            rows = [[None] * 3 for _ in range(3)]
            for i in range(3):
                for j in range(i, 3):
                    rows[i][j] = rows[j][i] = diff(d[i], j + 1)
            return tuple(tuple(r) for r in rows)

        return hess(dA), hess(dB)

    def values(self, p) -> tuple[float, float]:
        return evaluate(self.A, p), evaluate(self.B, p)

    def gradients(self, p) -> tuple[np.ndarray, np.ndarray]:
        """(A_1, A_2, A_3) and (B_1, B_2, B_3) at ``p``."""
        dA, dB = self.grad_exprs
        return (np.array([evaluate(e, p) for e in dA]),
                np.array([evaluate(e, p) for e in dB]))

    def hessians(self, p) -> tuple[np.ndarray, np.ndarray]:
        hA, hB = self.hessian_exprs
        return (np.array([[evaluate(e, p) for e in row] for row in hA]),
                np.array([[evaluate(e, p) for e in row] for row in hB]))

    def domain_margin(self, p) -> float:
        """Smallest of the constraint values, A - B and B at ``p``.

        Positive iff ``p`` is admissible.
        """
        a, b = self.values(p)
        margins = [a - b, b]
        margins += [evaluate(c, p) for c in self.constraints]
        return float(min(margins))

    def contains(self, p, margin: float = 0.0) -> bool:
        try:
            return self.domain_margin(p) > margin
        except ArithmeticError:
            return False


@dataclass(frozen=True)
class MetricAtPoint:
    a: float
    b: float
    d: float

    @classmethod
    def from_ab(cls, a: float, b: float) -> "MetricAtPoint":
        if not (a > b > 0):
            raise DomainViolation(f"need A > B > 0, got A={a!r}, B={b!r}")
        return cls(float(a), float(b), float((a - b) * (a + 2 * b)))

    @property
    def matrix(self) -> np.ndarray:
        return circulant(self.a, self.b, self.b)

    @property
    def inverse(self) -> np.ndarray:
        return circulant(self.a + self.b, -self.b, -self.b) / self.d


def circulant(c0: float, c1: float, c2: float) -> np.ndarray:
    return np.array([[c0, c1, c2], [c2, c0, c1], [c1, c2, c0]], dtype=float)


def metric_at(m: CirculantMetric, p) -> MetricAtPoint:
    for c in m.constraints:
        v = evaluate(c, p)
        if not v > 0:
            raise DomainViolation(f"constraint {c} > 0 fails at {tuple(p)} (value {v!r})")
    a, b = m.values(p)
    return MetricAtPoint.from_ab(a, b)


def apply_q(x) -> np.ndarray:
    """(x1, x2, x3) -> (x3, x1, x2)."""
    x = np.asarray(x)
    return x @ (Q_INT if x.dtype.kind in "iu" else Q)


def q_base(x) -> np.ndarray:
    """Rows x, qx, q^2 x."""
    x = np.asarray(x, dtype=float)
    qx = apply_q(x)
    return np.array([x, qx, apply_q(qx)])


def inner(g: MetricAtPoint, u, v) -> float:
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return float((g.a - g.b) * (u @ v) + g.b * u.sum() * v.sum())


def _cos_with_q(g: MetricAtPoint, x: np.ndarray) -> float:
    xx = inner(g, x, x)
    if xx == 0.0:
        raise ZeroVector("angle of the zero vector is undefined")
    return inner(g, x, apply_q(x)) / xx


def angle_with_q(g: MetricAtPoint, x, debug: bool = False) -> float:
    """Angle between ``x`` and ``qx`` in radians.

    g(qx, qx) = g(x, x), so the cosine is g(x, qx) / g(x, x).  With
    ``debug=True`` the symmetric form with both norms is also computed and
    the two must agree.
    """
    x = np.asarray(x, dtype=float)
    c = _cos_with_q(g, x)
    if debug:
        qx = apply_q(x)
        c2 = inner(g, x, qx) / math.sqrt(inner(g, x, x) * inner(g, qx, qx))
        assert abs(c - c2) <= 1e-12 * max(1.0, abs(c)), (c, c2)
    phi = math.acos(min(1.0, max(-1.0, c)))
    if not (0.0 < phi < 2.0 * math.pi / 3.0):
        warnings.warn(f"angle(x, qx) = {phi!r} outside (0, 2pi/3) for x = {x.tolist()}",
                      AngleRangeWarning, stacklevel=2)
    return phi


def q_independent(x, rtol: float = Q_INDEPENDENCE_RTOL) -> bool:
    """True iff x, qx, q^2 x are linearly independent.

    That is 3 x1 x2 x3 != x1^3 + x2^3 + x3^3, compared relative to |x|^3.
    """
    x1, x2, x3 = (float(c) for c in x)
    lhs = 3.0 * x1 * x2 * x3
    rhs = x1 ** 3 + x2 ** 3 + x3 ** 3
    scale = (x1 * x1 + x2 * x2 + x3 * x3) ** 1.5
    return abs(lhs - rhs) > rtol * scale


def orthonormal_q_base(g: MetricAtPoint, seed=0, max_starts: int = 16,
                       max_iter: int = 60, tol: float = 1e-13) -> np.ndarray:
    """Find x with g(x, x) = 1 and g(x, qx) = 0.

    {x, qx, q^2 x} is then orthonormal, because q preserves g.  Damped
    minimum-norm Newton iterations on the two scalar equations, restarted from
    random points up to ``max_starts`` times.
    """
    rng = as_rng(seed)
    G = g.matrix
    GQ = G @ Q.T  # g(x, qx) = x^T G (x Q)^T = x^T (G Q^T) x
    sym = GQ + GQ.T

    def residual(x):
        return np.array([x @ G @ x - 1.0, x @ GQ @ x])

    for _ in range(max_starts):
        x = rng.unit_vector(3) / math.sqrt(g.a)
        r = residual(x)
        for _ in range(max_iter):
            if np.max(np.abs(r)) <= tol:
                break
            J = np.array([2.0 * G @ x, sym @ x])
            step = np.linalg.lstsq(J, -r, rcond=None)[0]
            t = 1.0
            norm_r = np.linalg.norm(r)
            while t > 1e-6:
                trial = x + t * step
                r_trial = residual(trial)
                if np.linalg.norm(r_trial) < norm_r:
                    break
                t *= 0.5
            x, r = trial, r_trial
        if np.max(np.abs(r)) <= 1e-10 and q_independent(x):
            return x
    raise SolveFailure(f"no orthonormal q-base found for a={g.a!r}, b={g.b!r}")
