"""Levi-Civita connection and Riemann curvature of a circulant metric.

Index conventions (all arrays 0-based):

* ``gamma[h, i, k]`` is Gamma^h_{ik}; symmetric in (i, k).
* ``r13[h, i, j, k]`` is R^h_{ijk} = d_j Gamma^h_{ik} - d_k Gamma^h_{ij}
  + Gamma^t_{ik} Gamma^h_{tj} - Gamma^t_{ij} Gamma^h_{tk}, the components of
  R(e_j, e_k) e_i for R(x, y) z = nabla_x nabla_y z - nabla_y nabla_x z - nabla_[x,y] z.
* ``Curv4.r[i, j, k, u]`` is R(e_i, e_j, e_k, e_u) = g(R(e_i, e_j) e_k, e_u).
  With this reading R_1212 of the example manifold is
  (2X1 + X2 + X3) / ((X2 + X3)(6X1 + 2X2 + 2X3)).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .circulant import CirculantMetric, DomainViolation, MetricAtPoint, Q, metric_at

__all__ = [
    "Curv4", "CurvatureAt", "ClosedFormReport",
    "metric_derivatives", "christoffel_at", "curvature_at", "curv4_from_six",
    "six_components", "SIX_LABELS",
    "closed_form_components", "fd_christoffel", "fd_curvature_oracle",
]

SIX_LABELS = ("R1212", "R1313", "R2323", "R1213", "R1223", "R1323")
SIX_INDICES = ((0, 1, 0, 1), (0, 2, 0, 2), (1, 2, 1, 2), (0, 1, 0, 2), (0, 1, 1, 2), (0, 2, 1, 2))

_EYE = np.eye(3)
_OFF = 1.0 - _EYE


@dataclass(frozen=True)
class Curv4:
    """The (0,4) curvature tensor at a point, with multilinear evaluation."""

    r: np.ndarray = field(repr=False)

    def __call__(self, x, y, z, u) -> float:
        return float(np.einsum("ijku,i,j,k,u->", self.r, x, y, z, u))

    def transformed(self, slots=(True, True, True, True)) -> "Curv4":
        """Components of R with q inserted in the selected slots."""
        r = self.r
        mats = [Q if s else _EYE for s in slots]
        out = np.einsum("abcd,ia,jb,kc,ud->ijku", r, *mats)
        return Curv4(out)

    def shifted(self) -> "Curv4":
        """Components R_{i+1, j+1, k+1, u+1}; equals ``transformed()``."""
        s = [1, 2, 0]
        return Curv4(self.r[np.ix_(s, s, s, s)])

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.r)))


@dataclass(frozen=True)
class CurvatureAt:
    metric: MetricAtPoint
    gamma: np.ndarray = field(repr=False)
    r13: np.ndarray = field(repr=False)
    r4: Curv4 = field(repr=False)

    def __iter__(self):
        # allows ``r13, r4 = curvature_at(m, p)``
        return iter((self.r13, self.r4))


def metric_derivatives(m: CirculantMetric, p):
    """dg[i, a, k] = d_i g_ak and ddg[i, j, a, k] = d_i d_j g_ak from exact partials."""
    dA, dB = m.gradients(p)
    hA, hB = m.hessians(p)
    dg = dA[:, None, None] * _EYE + dB[:, None, None] * _OFF
    ddg = hA[:, :, None, None] * _EYE + hB[:, :, None, None] * _OFF
    return dg, ddg


def _christoffel(ginv: np.ndarray, dg: np.ndarray) -> np.ndarray:
    # first kind: c[a, i, k] = d_i g_ak + d_k g_ai - d_a g_ik
    c = np.einsum("iak->aik", dg) + np.einsum("kai->aik", dg) - dg
    return 0.5 * np.einsum("ha,aik->hik", ginv, c)


def christoffel_at(m: CirculantMetric, p) -> np.ndarray:
    """Gamma^h_{ik} at ``p`` as a (3, 3, 3) array indexed [h, i, k]."""
    g = metric_at(m, p)
    dg, _ = metric_derivatives(m, p)
    return _christoffel(g.inverse, dg)


def curvature_at(m: CirculantMetric, p) -> CurvatureAt:
    g = metric_at(m, p)
    ginv = g.inverse
    dg, ddg = metric_derivatives(m, p)
    c = np.einsum("iak->aik", dg) + np.einsum("kai->aik", dg) - dg
    dc = (np.einsum("jiak->jaik", ddg) + np.einsum("jkai->jaik", ddg)
          - np.einsum("jaik->jaik", ddg))
    gamma = 0.5 * np.einsum("ha,aik->hik", ginv, c)
    # d_j g^{ha} = -g^{hb} d_j g_bc g^{ca}
    dginv = -np.einsum("hb,jbc,ca->jha", ginv, dg, ginv)
    dgamma = 0.5 * (np.einsum("jha,aik->jhik", dginv, c) + np.einsum("ha,jaik->jhik", ginv, dc))
    r13 = (np.einsum("jhik->hijk", dgamma) - np.einsum("khij->hijk", dgamma)
           + np.einsum("tik,htj->hijk", gamma, gamma) - np.einsum("tij,htk->hijk", gamma, gamma))
    # R(e_i, e_j, e_k, e_u) = g(R(e_i, e_j) e_k, e_u) = R^a_{kij} g_au
    r4 = np.einsum("akij,au->ijku", r13, g.matrix)
    return CurvatureAt(g, gamma, r13, Curv4(r4))


def six_components(r4: Curv4) -> dict[str, float]:
    return {label: float(r4.r[idx]) for label, idx in zip(SIX_LABELS, SIX_INDICES)}


def curv4_from_six(values) -> Curv4:
    """Rebuild the full tensor from R1212, R1313, R2323, R1213, R1223, R1323.

    In dimension 3 these fill a symmetric 3x3 matrix over the bivectors
    (12), (13), (23), which fixes every component.
    """
    if isinstance(values, dict):
        values = [values[k] for k in SIX_LABELS]
    r = np.zeros((3, 3, 3, 3))
    for (i, j, k, u), v in zip(SIX_INDICES, values):
        for (a, b, s1) in ((i, j, 1.0), (j, i, -1.0)):
            for (c, d, s2) in ((k, u, 1.0), (u, k, -1.0)):
                r[a, b, c, d] = s1 * s2 * v
                r[c, d, a, b] = s1 * s2 * v
    return Curv4(r)


# -- printed closed forms ------------------------------------------------------

@dataclass
class ClosedFormReport:
    """Closed-form values next to the connection pipeline, per component.

    ``readings`` maps reading name -> {label: value}.  ``deviation`` holds the
    relative deviation of the "balanced" reading from the pipeline.
    """

    readings: dict
    pipeline: dict
    deviation: dict
    flagged: list
    tol: float

    @property
    def values(self) -> dict:
        return self.readings["balanced"]


def _closed_forms(a, b, dA, dB, hA, hB, reading="balanced"):
    A1, A2, A3 = dA
    B1, B2, B3 = dB
    Aij = lambda i, j: hA[i - 1, j - 1]  # noqa: E731
    Bij = lambda i, j: hB[i - 1, j - 1]  # noqa: E731
    D = (a - b) * (a + 2 * b)
    p = (a + b) / (4 * D)
    n = b / (4 * D)
    out = {}
    out["R1212"] = (0.5 * (2 * Bij(2, 1) - Aij(1, 1) - Aij(2, 2))
                    + p * (2 * A3 * B2 - A3 ** 2 + (B1 - B2 - B3) * (B1 + B2 - B3))
                    - n * (2 * A1 * (B1 + B2 - B3) - 2 * B2 * (B1 + B2 - B3) - 2 * A1 * A3 + 2 * A3 * B2))
    out["R1313"] = (0.5 * (2 * Bij(3, 1) - Aij(1, 1) - Aij(3, 3))
                    + p * (2 * A2 * B3 - A2 ** 2 + (-B1 + B2 + B3) * (-B1 + B2 - B3))
                    - n * (2 * A1 * (B1 - B2 + B3) - 2 * B3 * (B1 - B2 + B3) - 2 * A1 * A2 + 2 * A2 * B3))
    out["R2323"] = (0.5 * (2 * Bij(2, 3) - Aij(2, 2) - Aij(3, 3))
                    + p * (2 * B3 * A1 - A1 ** 2 + (B1 - B2 + B3) * (B1 - B2 - B3))
                    - n * (2 * A2 * (-B1 + B2 + B3) - 2 * B3 * (-B1 + B2 + B3) - 2 * A1 * A2 + 2 * A1 * B3))
    if reading == "balanced":
        bracket_1213 = A1 * (B2 - B3 + B1) + 2 * B3 * (-B1 - B2 + B3) + A2 * A3
    else:
        # the stray ")" closes the 2B3(...) group after A2A3
        bracket_1213 = A1 * (B2 - B3 + B1) + 2 * B3 * (-B1 - B2 + B3 + A2 * A3)
    out["R1213"] = (0.5 * (Bij(2, 1) + Bij(3, 1) - Bij(1, 1) - Aij(2, 3))
                    + p * bracket_1213
                    - n * (A1 ** 2 + A2 ** 2 + A3 ** 2 + 2 * A1 * (A2 - B3) - 2 * A2 * B3
                           - 2 * A3 * (B1 - B3) + (B1 - B2 - B3) * (B1 + B2 - B3)))
    out["R1223"] = (0.5 * (Bij(2, 2) - Bij(1, 2) - Bij(2, 3) + Aij(1, 3))
                    + p * (A2 * (B2 + B3 - B1) - (2 * B3 - A1) * (2 * B2 - A3))
                    - n * (-A1 ** 2 + A2 ** 2 + A3 ** 2 + 2 * A1 * (B2 + B3) + 2 * A2 * (B2 - B3)
                           + 2 * A3 * (B3 - B1) - 4 * B2 * B3 + (B1 + B2 - B3) * (B1 - B2 - B3)))
    out["R1323"] = (0.5 * (Bij(2, 3) - Bij(3, 3) + Bij(1, 3) - Aij(1, 2))
                    + p * ((2 * B2 - A1) * (2 * B3 - A2) - A3 * (-B1 + B2 + B3))
                    - n * (A1 ** 2 - A2 ** 2 - A3 ** 2 - 2 * A1 * (B2 + B3) + 2 * A2 * (B1 - B2)
                           + 2 * A3 * (B2 - B3) + 4 * B2 * B3 + (-B1 + B2 + B3) * (B1 - B2 + B3)))
    return {k: float(v) for k, v in out.items()}


CLOSED_FORM_READINGS = ("balanced", "alternate")


def closed_form_components(m: CirculantMetric, p, tol: float = 1e-7) -> ClosedFormReport:
    """Evaluate the six hand-derived component formulas and compare with the pipeline.

    The formulas were transcribed with unbalanced delimiters; "balanced"
    closes each scaled group at its bracket, "alternate" differs only in
    R1213 where a stray parenthesis admits a second grouping.  A component is
    flagged when its balanced value deviates from ``curvature_at`` by more
    than ``tol`` relative.
    """
    g = metric_at(m, p)
    dA, dB = m.gradients(p)
    hA, hB = m.hessians(p)
    readings = {name: _closed_forms(g.a, g.b, dA, dB, hA, hB, name) for name in CLOSED_FORM_READINGS}
    pipeline = six_components(curvature_at(m, p).r4)
    scale = max(max(abs(v) for v in pipeline.values()), 1e-12)
    deviation = {k: abs(readings["balanced"][k] - pipeline[k]) / scale for k in SIX_LABELS}
    flagged = [k for k in SIX_LABELS if deviation[k] > tol]
    return ClosedFormReport(readings, pipeline, deviation, flagged, tol)


# -- finite-difference oracle -----------------------------------------------------

def _metric_matrix(m: CirculantMetric, p) -> np.ndarray:
    return metric_at(m, p).matrix


def fd_christoffel(m: CirculantMetric, p, h: float = 1e-4) -> np.ndarray:
    """Christoffel symbols from central differences of the metric matrix only."""
    p = np.asarray(p, dtype=float)
    dg = np.empty((3, 3, 3))
    for i in range(3):
        e = h * _EYE[i]
        dg[i] = (_metric_matrix(m, p + e) - _metric_matrix(m, p - e)) / (2 * h)
    # first_kind[a, i, k] = (d_i g_ak + d_k g_ai - d_a g_ik) / 2
    first_kind = 0.5 * (np.einsum("iak->aik", dg) + np.einsum("kai->aik", dg) - dg)
    return np.einsum("ha,aik->hik", np.linalg.inv(_metric_matrix(m, p)), first_kind)


def fd_curvature_oracle(m: CirculantMetric, p, h: float = 1e-4) -> Curv4:
    """(0,4) curvature from nested central differences, without symbolic derivatives.

    Uses R(e_j, e_k) e_i = nabla_j W_ki - nabla_k W_ji on coordinate fields,
    where W_ki = nabla_k e_i = Gamma^h_{ki} e_h, and nabla_j V = (d_j V^h +
    Gamma^h_{jt} V^t) e_h.  Needs p +- 2h e_i inside the domain.
    """
    p = np.asarray(p, dtype=float)
    for i in range(3):
        for s in (-2.0, 2.0):
            if not m.contains(p + s * h * _EYE[i]):
                raise DomainViolation(f"finite-difference stencil leaves the domain at {p.tolist()}")
    gamma = fd_christoffel(m, p, h)
    # dW[j, k, i, h] = d_j Gamma^h_{ki}
    dW = np.empty((3, 3, 3, 3))
    for j in range(3):
        e = h * _EYE[j]
        dgam = (fd_christoffel(m, p + e, h) - fd_christoffel(m, p - e, h)) / (2 * h)
        dW[j] = np.einsum("hki->kih", dgam)
    W = np.einsum("hki->kih", gamma)  # W[k, i, h]
    # covariant derivative: cov[j, k, i, h] = dW[j, k, i, h] + Gamma^h_{jt} W[k, i, t]
    cov = dW + np.einsum("hjt,kit->jkih", gamma, W)
    R_vec = cov - cov.transpose(1, 0, 2, 3)  # R(e_j, e_k) e_i, components [j, k, i, h]
    G = _metric_matrix(m, p)
    return Curv4(np.einsum("jkih,hu->jkiu", R_vec, G))
