"""Pointwise and regional membership in the parallel class, V1 and V2."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, asdict

import numpy as np

from .circulant import S, CirculantMetric, DomainViolation
from .curvature import Curv4, curvature_at, six_components
from .rng import as_rng

__all__ = [
    "DEFAULT_TOL", "EmptySample", "ClassReport", "RegionReport",
    "parallel_check", "class_check", "classify_region", "sample_points",
    "v1_residual", "v2_residual", "v2_shift_residual", "system_residual",
]

DEFAULT_TOL = 1e-8
NEAR_FLAT = 1e-12
SAMPLING_MARGIN = 1e-9


class EmptySample(ValueError):
    """No sampled point satisfies the domain constraints."""


def _scale(r4: Curv4) -> float:
    mx = r4.max_abs
    return mx if mx > NEAR_FLAT else 1.0


def v1_residual(r4: Curv4) -> float:
    """max |R(x, y, qz, qu) - R(x, y, z, u)| over basis tuples, relative to max |R|."""
    return float(np.max(np.abs(r4.transformed((False, False, True, True)).r - r4.r))) / _scale(r4)


def v2_residual(r4: Curv4) -> float:
    return float(np.max(np.abs(r4.transformed().r - r4.r))) / _scale(r4)


def v2_shift_residual(r4: Curv4) -> float:
    """V2 residual via the cyclic relabelling 1 -> 2 -> 3 -> 1 of all indices."""
    return float(np.max(np.abs(r4.shifted().r - r4.r))) / _scale(r4)


def system_residual(r4: Curv4) -> float:
    """R1212 = R1313 = R2323 and R1213 = R1323 = -R1223, relative to max |R|."""
    c = six_components(r4)
    diffs = [
        c["R1212"] - c["R1313"], c["R1313"] - c["R2323"], c["R2323"] - c["R1212"],
        c["R1213"] - c["R1323"], c["R1323"] + c["R1223"], c["R1223"] + c["R1213"],
    ]
    return max(abs(d) for d in diffs) / _scale(r4)


def parallel_check(m: CirculantMetric, p, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """Is q parallel at ``p``, i.e. grad A = grad B . S (row vector times S)?"""
    m_ok = m.domain_margin(p)
    if not m_ok > 0:
        raise DomainViolation(f"point {tuple(p)} outside the domain")
    gA, gB = m.gradients(p)
    residual = float(np.max(np.abs(gA - gB @ S))) / (1.0 + float(np.max(np.abs(gA))))
    return residual <= tol, residual


@dataclass
class ClassReport:
    point: tuple
    parallel: bool
    v1: bool
    v2: bool
    flat: bool
    system: bool
    residuals: dict
    tol: float
    max_abs_r: float
    S: list = field(default_factory=lambda: S.tolist(), repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("S")
        d["point"] = list(self.point)
        return d


def class_check(m: CirculantMetric, p, tol: float = DEFAULT_TOL) -> ClassReport:
    curv = curvature_at(m, p)
    r4 = curv.r4
    par, par_res = parallel_check(m, p, tol)
    g = curv.metric
    flat_tol = 1e-10 * (1.0 + abs(g.a) + abs(g.b))
    res = {
        "parallel": par_res,
        "v1": v1_residual(r4),
        "v2": v2_residual(r4),
        "v2_shift": v2_shift_residual(r4),
        "system": system_residual(r4),
        "flat": r4.max_abs,
    }
    return ClassReport(
        point=tuple(float(c) for c in p),
        parallel=par,
        v1=res["v1"] <= tol,
        v2=res["v2"] <= tol,
        flat=r4.max_abs <= flat_tol,
        system=res["system"] <= tol,
        residuals=res,
        tol=tol,
        max_abs_r=r4.max_abs,
    )


def sample_points(m: CirculantMetric, box, count: int = 500, seed=0,
                  grid=None, margin: float = SAMPLING_MARGIN) -> list[np.ndarray]:
    """Admissible points of ``box`` (three [lo, hi] intervals).

    Random mode draws until ``count`` admissible points are found (giving up
    after 50 * count draws); grid mode keeps the admissible nodes of an
    n1 x n2 x n3 grid including the box corners.
    """
    box = np.asarray(box, dtype=float)
    if box.shape != (3, 2) or np.any(box[:, 1] < box[:, 0]):
        raise ValueError(f"sample box must be three [lo, hi] intervals, got {box.tolist()}")
    pts = []
    if grid is not None:
        axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(box, grid)]
        for p in itertools.product(*axes):
            p = np.array(p)
            if m.contains(p, margin):
                pts.append(p)
    else:
        rng = as_rng(seed)
        for _ in range(50 * count):
            p = rng.uniform(box[:, 0], box[:, 1])
            if m.contains(p, margin):
                pts.append(p)
                if len(pts) == count:
                    break
    if not pts:
        raise EmptySample(f"no admissible point in box {box.tolist()}")
    return pts


@dataclass
class RegionReport:
    reports: list
    counts: dict
    fractions: dict
    worst: dict
    tol: float
    chain_ok: bool
    system_agrees: bool

    def to_dict(self, include_points: bool = True) -> dict:
        d = {
            "n_points": len(self.reports),
            "counts": self.counts,
            "fractions": self.fractions,
            "worst_residuals": self.worst,
            "tol": self.tol,
            "chain_v1_implies_v2": self.chain_ok,
            "system_agrees_with_v2": self.system_agrees,
        }
        if include_points:
            d["points"] = [r.to_dict() for r in self.reports]
        return d


def classify_region(m: CirculantMetric, box, count: int = 500, seed=0, grid=None,
                    tol: float = DEFAULT_TOL) -> RegionReport:
    """class_check over sampled points of ``box``; deterministic for a fixed seed."""
    reports = [class_check(m, p, tol) for p in sample_points(m, box, count, seed, grid)]
    flags = ("parallel", "v1", "v2", "flat", "system")
    counts = {f: sum(bool(getattr(r, f)) for r in reports) for f in flags}
    n = len(reports)
    worst = {k: max(r.residuals[k] for r in reports) for k in reports[0].residuals}
    return RegionReport(
        reports=reports,
        counts=counts,
        fractions={f: counts[f] / n for f in flags},
        worst=worst,
        tol=tol,
        chain_ok=all(r.v2 for r in reports if r.v1),
        system_agrees=all(r.system == r.v2 for r in reports),
    )
