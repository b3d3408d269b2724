import itertools

import numpy as np
import pytest

from geomq.circulant import CirculantMetric
from geomq.expr import Const, X1, X2, X3

EXAMPLE_POINT = (1.0, -1.0, -0.5)
POLY_BOX = np.array([[-0.5, 0.5]] * 3)


def example_metric():
    return CirculantMetric.from_strings("2*X1", "2*X1 + X2 + X3", ["2*X1 + X2 + X3", "-(X2 + X3)"])


def cyclic_metric():
    return CirculantMetric.from_strings("2 + exp(X1 + X2 + X3)", "1 + (X1 + X2 + X3)^2/4")


def flat_metric(a=2.0, b=1.0):
    return CirculantMetric(Const(a), Const(b))


def _monomials():
    xs = (X1, X2, X3)
    out = []
    for deg in (1, 2, 3):
        for combo in itertools.combinations_with_replacement(range(3), deg):
            term = xs[combo[0]]
            for i in combo[1:]:
                term = term * xs[i]
            out.append(term)
    return out


MONOMIALS = _monomials()  # 19 non-constant monomials up to degree 3


def random_poly_metric(rng: np.random.Generator, scale: float = 0.05) -> CirculantMetric:
    """Generic cubic A, B with A > B > 0 on POLY_BOX.

    |monomial| <= 0.5 there, so each perturbation is bounded by 19 * scale * 0.5 < 0.5.
    """
    def poly(c0):
        e = Const(c0)
        for mono, c in zip(MONOMIALS, rng.uniform(-scale, scale, len(MONOMIALS))):
            e = e + float(c) * mono
        return e

    return CirculantMetric(poly(4.0), poly(1.5))


def random_box_point(rng: np.random.Generator, box=POLY_BOX):
    return rng.uniform(box[:, 0], box[:, 1])


def example_point(rng: np.random.Generator):
    """Uniform point of the example's box satisfying its constraints."""
    m = example_metric()
    while True:
        p = rng.uniform([0.5, -1.0, -1.0], [2.0, -0.1, -0.1])
        if m.contains(p, 1e-3):
            return p


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


# -- acceptance summary -------------------------------------------------------

_ACCEPTANCE = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        detail = dict(report.user_properties).get("criterion", report.nodeid.split("::")[-1])
        _ACCEPTANCE.append((report.outcome, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for outcome, detail in _ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {detail}")
