"""Command-line entry point ``geomq``.

Every command writes one JSON report (schema 1) and exits with
0 when all checks pass, 1 when a numerical check fails and 2 on usage or
domain errors.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import __version__
from .circulant import DomainViolation, SolveFailure, apply_q, inner, metric_at, q_independent
from .classification import DEFAULT_TOL, EmptySample, class_check, classify_region, sample_points
from .curvature import (christoffel_at, closed_form_components, curvature_at, six_components)
from .expr import EvaluationDomainError, ExprSyntaxError
from .rng import ALGORITHM, SplitMix64
from .sectional import (DegenerateAngle, DegenerateSection, DependentVector, NotInV2,
                        sectional_curvature, theorem1_check, theorem2_check)
from .spec import ManifoldSpec, SpecError, UnknownSpec, load_spec

SCHEMA = 1
EXAMPLE_POINT = (1.0, -1.0, -0.5)

TOL_INVERSE = 1e-12
TOL_SYMMETRY = 1e-9
TOL_THEOREM1 = 1e-8
TOL_THEOREM2 = 1e-6


def _check(name: str, value: float, tol: float, passed: bool | None = None) -> dict:
    if passed is None:
        passed = bool(value <= tol)
    return {"name": name, "value": float(value), "tol": float(tol), "pass": bool(passed)}


def _symmetry_residuals(r) -> dict:
    scale = max(float(np.max(np.abs(r))), 1e-12)
    return {
        "antisym_12": float(np.max(np.abs(r + r.transpose(1, 0, 2, 3)))) / scale,
        "antisym_34": float(np.max(np.abs(r + r.transpose(0, 1, 3, 2)))) / scale,
        "pair_symmetry": float(np.max(np.abs(r - r.transpose(2, 3, 0, 1)))) / scale,
        "bianchi": float(np.max(np.abs(r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3)))) / scale,
    }


def _parse_triple(text: str, what: str) -> tuple[float, float, float]:
    try:
        vals = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{what} must be three comma-separated numbers, got {text!r}")
    if len(vals) != 3 or not all(math.isfinite(v) for v in vals):
        raise argparse.ArgumentTypeError(f"{what} must be three finite numbers, got {text!r}")
    return vals


def _parse_grid(text: str) -> tuple[int, int, int]:
    try:
        n = tuple(int(v) for v in text.lower().split("x"))
    except ValueError:
        n = ()
    if len(n) != 3 or min(n) < 1:
        raise argparse.ArgumentTypeError(f"grid must look like 5x5x5, got {text!r}")
    return n


# -- commands -------------------------------------------------------------------

def cmd_eval(spec: ManifoldSpec, point, what: str = "all") -> tuple[dict, list]:
    m = spec.metric()
    g = metric_at(m, point)
    results, checks = {}, []
    if what in ("g", "all"):
        eye_err = float(np.max(np.abs(g.matrix @ g.inverse - np.eye(3))))
        results["metric"] = {"a": g.a, "b": g.b, "d": g.d,
                             "matrix": g.matrix.tolist(), "inverse": g.inverse.tolist()}
        checks.append(_check("g_times_inverse_is_identity", eye_err, TOL_INVERSE))
    if what in ("gamma", "all"):
        gamma = christoffel_at(m, point)
        results["christoffel"] = gamma.tolist()
        checks.append(_check("christoffel_symmetric",
                             float(np.max(np.abs(gamma - gamma.transpose(0, 2, 1)))), 0.0))
    if what in ("riemann", "all"):
        curv = curvature_at(m, point)
        results["riemann"] = {"components": six_components(curv.r4), "r4": curv.r4.r.tolist()}
        for name, v in _symmetry_residuals(curv.r4.r).items():
            checks.append(_check(f"curv4_{name}", v, TOL_SYMMETRY))
    return {"point": list(point), "what": what, **results}, checks


def cmd_classify(spec: ManifoldSpec, samples: int, grid, seed: int, tol: float) -> tuple[dict, list]:
    region = classify_region(spec.metric(), spec.sample_box, count=samples, seed=seed, grid=grid, tol=tol)
    checks = [
        _check("v1_implies_v2", 0.0, 0.0, region.chain_ok),
        _check("system_equivalent_to_v2", 0.0, 0.0, region.system_agrees),
        _check("v2_contraction_equals_shift",
               max(abs(r.residuals["v2"] - r.residuals["v2_shift"]) for r in region.reports), 1e-12),
    ]
    return region.to_dict(), checks


def cmd_sectional(spec: ManifoldSpec, point, vector) -> tuple[dict, list]:
    m = spec.metric()
    curv = curvature_at(m, point)
    R, g = curv.r4, curv.metric
    x = np.asarray(vector, dtype=float)
    report = class_check(m, point)
    results = {"point": list(point), "vector": list(vector), "q_independent": q_independent(x),
               "class": report.to_dict()}
    checks = []
    if not q_independent(x):
        raise DependentVector(f"vector {list(vector)} violates the independence condition")
    qx, q2x = apply_q(x), apply_q(apply_q(x))
    cosphi = inner(g, x, qx) / inner(g, x, x)
    results["phi"] = math.acos(min(1.0, max(-1.0, cosphi)))
    results["mu"] = {"x_qx": sectional_curvature(R, g, x, qx),
                     "qx_q2x": sectional_curvature(R, g, qx, q2x),
                     "q2x_x": sectional_curvature(R, g, q2x, x)}
    checks.append(_check("phi_in_open_interval_0_2pi_over_3", results["phi"], 2 * math.pi / 3,
                         0.0 < results["phi"] < 2 * math.pi / 3))
    if report.v2:
        t1 = theorem1_check(m, point, x, TOL_THEOREM1)
        results["theorem1"] = t1.to_dict()
        for key in ("mu_equal", "dopl", "dop2"):
            checks.append(_check(f"theorem1_{key}", t1.residuals[key], TOL_THEOREM1))
    return results, checks


def cmd_verify_example() -> tuple[dict, list]:
    spec = load_spec("paper-example")
    m = spec.metric()
    p = EXAMPLE_POINT
    x1, x2, x3 = p
    expected = (2 * x1 + x2 + x3) / ((x2 + x3) * (6 * x1 + 2 * x2 + 2 * x3))
    comps = six_components(curvature_at(m, p).r4)
    report = class_check(m, p)
    closed = closed_form_components(m, p)
    results = {
        "point": list(p),
        "R1212": comps["R1212"],
        "R1212_expected": expected,
        "components": comps,
        "class": report.to_dict(),
        "closed_forms": {"readings": closed.readings, "deviation": closed.deviation,
                         "flagged": closed.flagged, "tol": closed.tol},
    }
    checks = [
        _check("R1212_equals_minus_one_ninth", abs(comps["R1212"] + 1.0 / 9.0), 1e-10),
        _check("v2_true", report.residuals["v2"], report.tol, report.v2),
        _check("system_r1_eq_r6", report.residuals["system"], report.tol, report.system),
        _check("parallel_false", report.residuals["parallel"], report.tol, not report.parallel),
        _check("flat_false", abs(comps["R1212"]), 1e-3, abs(comps["R1212"]) > 1e-3),
    ]
    return results, checks


def cmd_theorems(spec: ManifoldSpec, trials: int, seed: int) -> tuple[dict, list]:
    m = spec.metric()
    rng = SplitMix64(seed)
    points = sample_points(m, spec.sample_box, count=trials, seed=rng)
    rows = []
    worst = {"theorem1_mu_equal": 0.0, "theorem1_dopl": 0.0, "theorem1_dop2": 0.0, "theorem2_mu_r2": 0.0}
    failures = {"not_in_v2": 0, "theorem1": 0, "theorem2": 0}
    for k, p in enumerate(points):
        while True:
            x = rng.uniform(-1.0, 1.0, 3)
            if q_independent(x):
                break
        while True:
            c = rng.unit_vector(3)
            if q_independent(c) and 1.0 + float(c[0] * c[1] + c[1] * c[2] + c[2] * c[0]) > 1e-6:
                break
        row = {"index": k, "point": p.tolist(), "x": x.tolist(), "coeffs": c.tolist()}
        # off V2 the theorems have no claim; residuals are still recorded
        t1 = theorem1_check(m, p, x, TOL_THEOREM1, require_v2=False)
        t2 = theorem2_check(m, p, c, TOL_THEOREM2, seed=rng, require_v2=False)
        row["in_v2"] = t1.residuals["v2"] <= DEFAULT_TOL
        failures["not_in_v2"] += not row["in_v2"]
        row["theorem1"] = {"mu": list(t1.mu), "residuals": t1.residuals, "passed": t1.passed}
        row["theorem2"] = {"cosphi": t2.cosphi, "mu_u": t2.mu_u, "predicted": t2.predicted,
                           "residuals": t2.residuals, "passed": t2.passed}
        worst["theorem1_mu_equal"] = max(worst["theorem1_mu_equal"], t1.residuals["mu_equal"])
        worst["theorem1_dopl"] = max(worst["theorem1_dopl"], t1.residuals["dopl"])
        worst["theorem1_dop2"] = max(worst["theorem1_dop2"], t1.residuals["dop2"])
        worst["theorem2_mu_r2"] = max(worst["theorem2_mu_r2"], t2.residuals["mu_r2"])
        failures["theorem1"] += not t1.passed
        failures["theorem2"] += not t2.passed
        rows.append(row)
    checks = [
        _check("all_points_in_v2", failures["not_in_v2"], 0, failures["not_in_v2"] == 0),
        _check("theorem1_mu_equal", worst["theorem1_mu_equal"], TOL_THEOREM1),
        _check("theorem1_dopl", worst["theorem1_dopl"], TOL_THEOREM1),
        _check("theorem1_dop2", worst["theorem1_dop2"], TOL_THEOREM1),
        _check("theorem2_mu_r2", worst["theorem2_mu_r2"], TOL_THEOREM2),
    ]
    return {"trials": rows, "worst_residuals": worst, "failures": failures}, checks


# -- driver ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="geomq", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"geomq {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--spec", required=True, help="built-in name or JSON spec file")
        p.add_argument("--out", help="write the JSON report here instead of standard output")

    p = sub.add_parser("eval", help="metric, Christoffel symbols and curvature at a point")
    common(p)
    p.add_argument("--point", required=True, type=lambda s: _parse_triple(s, "point"))
    p.add_argument("--what", choices=["g", "gamma", "riemann", "all"], default="all")

    p = sub.add_parser("classify", help="parallel / V1 / V2 / flat over the sample box")
    common(p)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--grid", type=_parse_grid)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)

    p = sub.add_parser("sectional", help="curvatures of the three q-sections of a vector")
    common(p)
    p.add_argument("--point", required=True, type=lambda s: _parse_triple(s, "point"))
    p.add_argument("--vector", required=True, type=lambda s: _parse_triple(s, "vector"))

    p = sub.add_parser("verify-example", help="reproduce the worked example at (1, -1, -0.5)")
    common(p, spec=False)

    p = sub.add_parser("theorems", help="randomised checks of both sectional-curvature theorems")
    common(p)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    return parser


def run(command: str, spec: ManifoldSpec | None = None, **options) -> tuple[dict, int]:
    """Execute one command and return (report, exit code)."""
    if command == "eval":
        results, checks = cmd_eval(spec, options["point"], options.get("what", "all"))
    elif command == "classify":
        results, checks = cmd_classify(spec, options.get("samples", 500), options.get("grid"),
                                       options.get("seed", 0), options.get("tol", DEFAULT_TOL))
    elif command == "sectional":
        results, checks = cmd_sectional(spec, options["point"], options["vector"])
    elif command == "verify-example":
        spec = load_spec("paper-example")
        results, checks = cmd_verify_example()
    elif command == "theorems":
        results, checks = cmd_theorems(spec, options.get("trials", 100), options.get("seed", 0))
    else:
        raise ValueError(f"unknown command {command!r}")
    passed = all(c["pass"] for c in checks)
    report = {
        "schema": SCHEMA,
        "command": {"name": command, "options": _jsonable(options)},
        "spec": spec.to_dict() if spec is not None else None,
        "spec_name": spec.name if spec is not None else None,
        "spec_hash": spec.hash if spec is not None else None,
        "seed": options.get("seed"),
        "rng": ALGORITHM,
        "results": results,
        "checks": checks,
        "verdict": "pass" if passed else "fail",
    }
    return report, 0 if passed else 1


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else repr(v)
    return obj


def dumps(report: dict) -> str:
    return json.dumps(_jsonable(report), sort_keys=True, indent=2, allow_nan=False) + "\n"


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    options = {k: v for k, v in vars(args).items() if k not in ("command", "spec", "out") and v is not None}
    try:
        spec = load_spec(args.spec) if getattr(args, "spec", None) else None
        report, code = run(args.command, spec, **options)
    except (DomainViolation, EvaluationDomainError, ExprSyntaxError, SpecError, UnknownSpec,
            EmptySample, DependentVector, DegenerateSection, DegenerateAngle, SolveFailure,
            NotInV2) as exc:
        print(f"geomq: error: {exc}", file=sys.stderr)
        return 2
    text = dumps(report)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if code:
        failed = [c["name"] for c in report["checks"] if not c["pass"]]
        print(f"geomq: checks failed: {', '.join(failed)}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
