"""Sectional curvatures of q-sections and numerical checks of the two theorems.

For a point in V2 and a vector x with x, qx, q^2 x independent, the three
q-sections {x, qx}, {qx, q^2 x}, {q^2 x, x} have equal curvature (Theorem 1).
For an orthonormal q-base {x, qx, q^2 x}, any admissible u and a vector y
with angle(y, qy) = pi/3, mu(u, qu) is an affine function of mu(x, qx) and
mu(y, qy) with coefficients depending only on phi = angle(u, qu) (Theorem 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, asdict

import numpy as np

from .circulant import (CirculantMetric, MetricAtPoint, apply_q, inner, metric_at,
                        orthonormal_q_base, q_independent)
from .classification import DEFAULT_TOL, v2_residual
from .curvature import Curv4, curvature_at
from .rng import as_rng

__all__ = [
    "DegenerateSection", "NotInV2", "DependentVector", "DegenerateAngle",
    "QSectionReport", "Theorem2Report", "MonotonicityReport",
    "sectional_curvature", "theorem1_check", "theorem2_check", "monotonicity_scan",
    "coefficient_terms", "coefficient_identities", "coefficients_for_cos",
    "cor1_expansion", "cor_expansion",
]


class DegenerateSection(ValueError):
    """The two vectors do not span a plane."""


class NotInV2(ValueError):
    pass


class DependentVector(ValueError):
    """x, qx, q^2 x are linearly dependent."""


class DegenerateAngle(ValueError):
    """1 + cos(phi) too close to 0."""


def sectional_curvature(R: Curv4, g: MetricAtPoint, x, y) -> float:
    """mu(x, y) = R(x, y, x, y) / (g(x, x) g(y, y) - g(x, y)^2)."""
    xx, yy, xy = inner(g, x, x), inner(g, y, y), inner(g, x, y)
    den = xx * yy - xy * xy
    if not den > 1e-12 * xx * yy:
        raise DegenerateSection("vectors are linearly dependent")
    return R(x, y, x, y) / den


def _rel_spread(values, floor: float = 1e-12) -> float:
    values = np.asarray(values, dtype=float)
    spread = float(values.max() - values.min())
    scale = float(np.max(np.abs(values)))
    return spread / scale if scale > floor else spread


def _rel_err(a: float, b: float, floor: float = 1e-12) -> float:
    scale = max(abs(a), abs(b))
    return abs(a - b) / scale if scale > floor else abs(a - b)


def _require_v2(r4: Curv4, tol: float, enforce: bool = True) -> float:
    res = v2_residual(r4)
    if enforce and res > tol:
        raise NotInV2(f"point is not in V2 (residual {res:.3e} > {tol:.1e})")
    return res


@dataclass
class QSectionReport:
    point: tuple
    x: tuple
    phi: float
    mu: tuple  # mu(x, qx), mu(qx, q^2 x), mu(q^2 x, x)
    mixed: float  # R(x, qx, x, q^2 x)
    residuals: dict
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"], d["x"], d["mu"] = list(self.point), list(self.x), list(self.mu)
        return d


def theorem1_check(m: CirculantMetric, p, x, tol: float = 1e-8,
                   class_tol: float = DEFAULT_TOL, require_v2: bool = True) -> QSectionReport:
    """Curvatures of the three q-sections of ``x`` and the two R identities behind them.

    With ``require_v2=False`` the residuals are computed even off V2, which
    shows how far the conclusions fail there.
    """
    curv = curvature_at(m, p)
    R, g = curv.r4, curv.metric
    v2 = _require_v2(R, class_tol, require_v2)
    x = np.asarray(x, dtype=float)
    if not q_independent(x):
        raise DependentVector(f"x = {x.tolist()} violates the independence condition")
    qx = apply_q(x)
    q2x = apply_q(qx)
    mus = (sectional_curvature(R, g, x, qx),
           sectional_curvature(R, g, qx, q2x),
           sectional_curvature(R, g, q2x, x))
    cosphi = inner(g, x, qx) / inner(g, x, x)
    phi = math.acos(min(1.0, max(-1.0, cosphi)))
    dopl = (R(x, qx, x, qx), R(x, q2x, x, q2x), R(qx, q2x, qx, q2x))
    dop2 = (R(x, qx, q2x, x), R(qx, q2x, x, qx), R(q2x, x, qx, q2x))
    # common value with the reduced denominator g(x,x)^2 - g(x,qx)^2
    reduced = dopl[0] / (inner(g, x, x) ** 2 - inner(g, x, qx) ** 2)
    residuals = {
        "v2": v2,
        "mu_equal": _rel_spread(mus),
        "mu_reduced": _rel_spread(list(mus) + [reduced]),
        "dopl": _rel_spread(dopl),
        "dop2": _rel_spread(dop2),
    }
    passed = (residuals["mu_equal"] <= tol and residuals["dopl"] <= tol
              and residuals["dop2"] <= tol)
    return QSectionReport(
        point=tuple(float(c) for c in p), x=tuple(x.tolist()), phi=phi, mu=mus,
        mixed=R(x, qx, x, q2x), residuals=residuals, tol=tol, passed=passed,
    )


# -- coefficient algebra ------------------------------------------------------

def coefficient_terms(alpha, beta, gamma):
    """(alpha^2 - beta gamma, gamma^2 - alpha beta, beta^2 - alpha gamma)."""
    return (alpha * alpha - beta * gamma, gamma * gamma - alpha * beta, beta * beta - alpha * gamma)


def coefficient_identities(alpha, beta, gamma) -> dict:
    """Both sides of the two identities valid when alpha^2 + beta^2 + gamma^2 = 1.

    With c = alpha beta + beta gamma + gamma alpha:
    sum of squared terms = 1 - c^2 and sum of pairwise products = c^2 - c.
    """
    P, Qt, T = coefficient_terms(alpha, beta, gamma)
    c = alpha * beta + beta * gamma + gamma * alpha
    return {
        "squares": (P * P + Qt * Qt + T * T, 1.0 - c * c),
        "products": (P * Qt + Qt * T + P * T, c * c - c),
    }


def coefficients_for_cos(cosphi: float, direction: float = 0.0) -> np.ndarray:
    """A unit triple (alpha, beta, gamma) with alpha beta + beta gamma + gamma alpha = cosphi.

    (alpha + beta + gamma)^2 = 1 + 2 cosphi fixes the component along
    (1, 1, 1); ``direction`` rotates the remainder in the orthogonal plane.
    Needs -1/2 <= cosphi <= 1.
    """
    if not -0.5 <= cosphi <= 1.0:
        raise ValueError(f"cos(phi) must lie in [-1/2, 1], got {cosphi}")
    along = math.sqrt((1.0 + 2.0 * cosphi) / 3.0)
    perp = math.sqrt(max(0.0, 1.0 - along * along))
    e0 = np.ones(3) / math.sqrt(3.0)
    e1 = np.array([1.0, -1.0, 0.0]) / math.sqrt(2.0)
    e2 = np.array([1.0, 1.0, -2.0]) / math.sqrt(6.0)
    return along * e0 + perp * (math.cos(direction) * e1 + math.sin(direction) * e2)


def cor1_expansion(R: Curv4, base: np.ndarray, alpha, beta, gamma) -> float:
    """R(u, qu, u, qu) from the six section terms of the q-base."""
    x, qx, q2x = base
    P, Qt, T = coefficient_terms(alpha, beta, gamma)
    return (P * P * R(x, qx, x, qx) + Qt * Qt * R(x, q2x, x, q2x) + T * T * R(qx, q2x, qx, q2x)
            + 2 * P * Qt * R(x, qx, q2x, x) + 2 * Qt * T * R(q2x, x, qx, q2x)
            + 2 * P * T * R(x, qx, qx, q2x))


def cor_expansion(R: Curv4, base: np.ndarray, alpha, beta, gamma) -> float:
    """R(u, qu, u, qu) after collapsing the V2 equalities into two terms."""
    x, qx, q2x = base
    P, Qt, T = coefficient_terms(alpha, beta, gamma)
    return ((P * P + Qt * Qt + T * T) * R(x, qx, x, qx)
            + 2 * (P * Qt + Qt * T + P * T) * R(x, qx, q2x, x))


@dataclass
class Theorem2Report:
    point: tuple
    coeffs: tuple
    cosphi: float
    phi: float
    mu_u: float
    mu_x: float
    mu_y: float
    predicted: float
    residuals: dict
    sign_note: str
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["point"], d["coeffs"] = list(self.point), list(self.coeffs)
        return d


def theorem2_check(m: CirculantMetric, p, coeffs, tol: float = 1e-6, seed=0,
                   class_tol: float = DEFAULT_TOL, require_v2: bool = True) -> Theorem2Report:
    """Check each step from u = alpha x + beta qx + gamma q^2 x to the final formula.

    Residual keys: ``qu`` (image of u), ``n41_norm`` / ``n41_cross`` (inner
    products in the q-base), ``identity_squares`` / ``identity_products``
    (normalised coefficient identities), ``cor1`` / ``cor`` (expansions of
    R(u, qu, u, qu)), ``mu`` (the unsimplified quotient), ``mu_r`` and
    ``mu_r2`` (final forms).  ``passed`` requires ``mu_r2 <= tol``.
    """
    curv = curvature_at(m, p)
    R, g = curv.r4, curv.metric
    v2 = _require_v2(R, class_tol, require_v2)
    alpha, beta, gamma = (float(c) for c in coeffs)
    if not q_independent((alpha, beta, gamma)):
        raise DependentVector(f"coefficients {coeffs} give dependent u, qu, q^2 u")

    x = orthonormal_q_base(g, seed)
    qx = apply_q(x)
    q2x = apply_q(qx)
    base = np.array([x, qx, q2x])
    u = alpha * x + beta * qx + gamma * q2x
    qu = apply_q(u)
    res = {"v2": v2}
    res["qu"] = float(np.max(np.abs(qu - (gamma * x + alpha * qx + beta * q2x)))) / max(1.0, float(np.max(np.abs(u))))

    uu, uqu = inner(g, u, u), inner(g, u, qu)
    norm2 = alpha ** 2 + beta ** 2 + gamma ** 2
    cross = alpha * beta + beta * gamma + gamma * alpha
    res["n41_norm"] = _rel_err(uu, norm2)
    res["n41_cross"] = abs(uqu - cross) / norm2
    cosphi = uqu / uu
    if 1.0 + cosphi < 1e-9:
        raise DegenerateAngle(f"1 + cos(phi) = {1.0 + cosphi:.3e}")
    phi = math.acos(min(1.0, max(-1.0, cosphi)))

    s = math.sqrt(norm2)
    ids = coefficient_identities(alpha / s, beta / s, gamma / s)
    res["identity_squares"] = abs(ids["squares"][0] - ids["squares"][1])
    res["identity_products"] = abs(ids["products"][0] - ids["products"][1])

    direct = R(u, qu, u, qu)
    res["cor1"] = _rel_err(cor1_expansion(R, base, alpha, beta, gamma), direct)
    res["cor"] = _rel_err(cor_expansion(R, base, alpha, beta, gamma), direct)

    mu_u = sectional_curvature(R, g, u, qu)
    mu_x = sectional_curvature(R, g, x, qx)
    P, Qt, T = coefficient_terms(alpha, beta, gamma)
    den = norm2 ** 2 - cross ** 2
    mu_printed = ((P * P + Qt * Qt + T * T) / den * mu_x
                  + 2 * ((P * Qt + Qt * T) / den + P * T / den) * R(x, qx, q2x, x))
    res["mu"] = _rel_err(mu_printed, mu_u)

    mixed = R(x, qx, x, q2x)
    mu_r = mu_x + 2 * cosphi / (1 + cosphi) * mixed
    mu_r_swapped = mu_x + 2 * cosphi / (1 + cosphi) * R(x, qx, q2x, x)
    res["mu_r"] = _rel_err(mu_r, mu_u)
    res["mu_r_swapped_slots"] = _rel_err(mu_r_swapped, mu_u)
    sign_note = ("R(x,qx,x,q2x) reconciles the reduced formula" if res["mu_r"] <= res["mu_r_swapped_slots"]
                 else "R(x,qx,q2x,x) reconciles the reduced formula")

    y_coeffs = coefficients_for_cos(0.5)
    y = y_coeffs @ base
    mu_y = sectional_curvature(R, g, y, apply_q(y))
    predicted = ((1 - 2 * cosphi) / (1 + cosphi) * mu_x + 3 * cosphi / (1 + cosphi) * mu_y)
    scale = max(abs(mu_u), abs(mu_x), abs(mu_y))
    res["mu_r2"] = abs(predicted - mu_u) / scale if scale > 1e-12 else abs(predicted - mu_u)

    return Theorem2Report(
        point=tuple(float(c) for c in p), coeffs=(alpha, beta, gamma), cosphi=cosphi, phi=phi,
        mu_u=mu_u, mu_x=mu_x, mu_y=mu_y, predicted=predicted, residuals=res,
        sign_note=sign_note, tol=tol, passed=res["mu_r2"] <= tol,
    )


@dataclass
class MonotonicityReport:
    table: list  # rows (phi bin centre, mean mu, count)
    equal_angle_residual: float
    monotone: bool
    direction: str  # "increasing", "decreasing" or "constant"
    mixed_sign: int  # sign of R(x, qx, x, q^2 x)
    tol: float
    passed: bool


def monotonicity_scan(m: CirculantMetric, p, samples: int = 2000, bins: int = 50,
                      seed=0, tol: float = 1e-6, class_tol: float = DEFAULT_TOL) -> MonotonicityReport:
    """Sample u on the coefficient sphere and tabulate mu(u, qu) against phi.

    Each sample is paired with a second vector of the same angle but rotated
    coefficients; their curvatures must agree.  Bin means must be monotone
    in phi.
    """
    curv = curvature_at(m, p)
    R, g = curv.r4, curv.metric
    _require_v2(R, class_tol)
    rng = as_rng(seed)
    x = orthonormal_q_base(g, rng)
    base = np.array([x, apply_q(x), apply_q(apply_q(x))])

    def mu_of(coeffs):
        u = coeffs @ base
        return sectional_curvature(R, g, u, apply_q(u))

    phis, mus, worst = [], [], 0.0
    while len(phis) < samples:
        c = rng.unit_vector(3)
        cosphi = float(c[0] * c[1] + c[1] * c[2] + c[2] * c[0])
        if not q_independent(c) or 1.0 + cosphi < 1e-6 or cosphi > 1.0 - 1e-6:
            continue
        mu = mu_of(c)
        twin = coefficients_for_cos(cosphi, direction=rng.uniform(0.0, 2.0 * math.pi))
        worst = max(worst, _rel_err(mu_of(twin), mu))
        phis.append(math.acos(cosphi))
        mus.append(mu)
    phis, mus = np.array(phis), np.array(mus)
    edges = np.linspace(phis.min(), phis.max(), bins + 1)
    idx = np.clip(np.searchsorted(edges, phis, side="right") - 1, 0, bins - 1)
    table = []
    for b in range(bins):
        sel = idx == b
        if sel.any():
            table.append((float(0.5 * (edges[b] + edges[b + 1])), float(mus[sel].mean()), int(sel.sum())))
    means = np.array([row[1] for row in table])
    steps = np.diff(means)
    slack = tol * max(1.0, float(np.max(np.abs(means))))
    increasing = bool(np.all(steps >= -slack))
    decreasing = bool(np.all(steps <= slack))
    if increasing and decreasing:
        direction = "constant"
    else:
        direction = "increasing" if increasing else "decreasing" if decreasing else "none"
    mixed = R(base[0], base[1], base[0], base[2])
    return MonotonicityReport(
        table=table, equal_angle_residual=worst, monotone=increasing or decreasing,
        direction=direction, mixed_sign=int(np.sign(round(mixed, 14))), tol=tol,
        passed=(increasing or decreasing) and worst <= tol,
    )
