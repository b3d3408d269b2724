import numpy as np
import pytest

from geomq.circulant import CirculantMetric, DomainViolation
from geomq.curvature import (SIX_LABELS, christoffel_at, closed_form_components, curv4_from_six,
                             curvature_at, fd_christoffel, fd_curvature_oracle, six_components)

from conftest import (EXAMPLE_POINT, example_metric, example_point, flat_metric, random_box_point,
                      random_poly_metric)


def symmetry_residual(r):
    scale = max(np.max(np.abs(r)), 1e-300)
    return max(
        np.max(np.abs(r + r.transpose(1, 0, 2, 3))),
        np.max(np.abs(r + r.transpose(0, 1, 3, 2))),
        np.max(np.abs(r - r.transpose(2, 3, 0, 1))),
        np.max(np.abs(r + r.transpose(1, 2, 0, 3) + r.transpose(2, 0, 1, 3))),
    ) / scale


def test_constant_metric_is_flat():
    m = flat_metric(2.0, 1.0)
    assert np.all(christoffel_at(m, (0.1, 0.2, 0.3)) == 0.0)
    curv = curvature_at(m, (0.1, 0.2, 0.3))
    assert np.all(curv.r13 == 0.0) and np.all(curv.r4.r == 0.0)
    np.testing.assert_allclose(fd_curvature_oracle(m, (0.1, 0.2, 0.3)).r, 0.0, atol=1e-10)


def test_christoffel_symmetric_in_lower_indices(rng):
    for _ in range(5):
        m = random_poly_metric(rng)
        gamma = christoffel_at(m, random_box_point(rng))
        assert np.array_equal(gamma, gamma.transpose(0, 2, 1))


def test_christoffel_matches_fd_on_example():
    exact = christoffel_at(example_metric(), EXAMPLE_POINT)
    approx = fd_christoffel(example_metric(), EXAMPLE_POINT, 1e-5)
    np.testing.assert_allclose(approx, exact, atol=1e-6)


def test_example_r1212_closed_values():
    m = example_metric()
    # (2X1 + X2 + X3) / ((X2 + X3)(6X1 + 2X2 + 2X3)) at the two points
    assert six_components(curvature_at(m, (1.0, -1.0, -0.5)).r4)["R1212"] == pytest.approx(-1 / 9, abs=1e-14)
    assert six_components(curvature_at(m, (2.0, -0.5, -0.5)).r4)["R1212"] == pytest.approx(-0.3, abs=1e-14)


def test_example_r1212_identity(rng):
    m = example_metric()
    for _ in range(100):
        x1, x2, x3 = p = example_point(rng)
        r1212 = curvature_at(m, p).r4.r[0, 1, 0, 1]
        lhs = r1212 * (x2 + x3) * (6 * x1 + 2 * x2 + 2 * x3)
        assert lhs == pytest.approx(2 * x1 + x2 + x3, rel=1e-8)


def test_example_full_component_set(rng):
    # exact rational forms derived symbolically (independent of this package):
    # R1212 = R1313 = R2323 = (2X1+X2+X3)/(2 den), R1213 = 2X1/den,
    # R1223 = X1/den, R1323 = -X1/den with den = (X2+X3)(3X1+X2+X3)
    m = example_metric()
    for _ in range(50):
        x1, x2, x3 = p = example_point(rng)
        den = (x2 + x3) * (3 * x1 + x2 + x3)
        expected = {"R1212": (2 * x1 + x2 + x3) / (2 * den), "R1313": (2 * x1 + x2 + x3) / (2 * den),
                    "R2323": (2 * x1 + x2 + x3) / (2 * den), "R1213": 2 * x1 / den,
                    "R1223": x1 / den, "R1323": -x1 / den}
        got = six_components(curvature_at(m, p).r4)
        for k in SIX_LABELS:
            assert got[k] == pytest.approx(expected[k], rel=1e-10)


def test_tensor_symmetries_and_bianchi(rng):
    for _ in range(10):
        m = random_poly_metric(rng)
        for _ in range(20):
            curv = curvature_at(m, random_box_point(rng))
            assert symmetry_residual(curv.r4.r) <= 1e-9
            assert np.max(np.abs(curv.r13 + curv.r13.transpose(0, 1, 3, 2))) <= 1e-12


def test_slot_convention_matches_coordinate_free_oracle():
    m = example_metric()
    exact = curvature_at(m, EXAMPLE_POINT).r4.r
    oracle = fd_curvature_oracle(m, EXAMPLE_POINT, 1e-4).r
    assert np.max(np.abs(oracle - exact)) <= 1e-4 * np.max(np.abs(exact))
    # and not the opposite sign convention
    assert np.max(np.abs(oracle + exact)) > 0.5


def test_analytic_matches_fd_oracle_on_random_manifolds(rng):
    for _ in range(4):
        m = random_poly_metric(rng)
        for _ in range(5):
            p = random_box_point(rng)
            exact = curvature_at(m, p).r4.r
            oracle = fd_curvature_oracle(m, p, 1e-4).r
            assert np.max(np.abs(oracle - exact)) <= 1e-4 * np.max(np.abs(exact))


def test_fd_oracle_refuses_stencil_outside_domain():
    # X2 + X3 = -1e-5 is inside, but p + 2h e_2 is not
    with pytest.raises(DomainViolation):
        fd_curvature_oracle(example_metric(), (1.0, -0.5, 0.5 - 1e-5), 1e-4)


def test_curv4_rebuilt_from_six_components(rng):
    for _ in range(20):
        m = random_poly_metric(rng)
        r4 = curvature_at(m, random_box_point(rng)).r4
        rebuilt = curv4_from_six(six_components(r4))
        # equal up to the rounding left in the raw antisymmetries
        assert np.max(np.abs(rebuilt.r - r4.r)) <= 1e-13 * r4.max_abs
        for idx in [(0, 1, 0, 1), (0, 2, 0, 2), (1, 2, 1, 2), (0, 1, 0, 2), (0, 1, 1, 2), (0, 2, 1, 2)]:
            assert rebuilt.r[idx] == r4.r[idx]


def test_curv4_multilinear_evaluation(rng):
    r4 = curvature_at(random_poly_metric(rng), random_box_point(rng)).r4
    e = np.eye(3)
    assert r4(e[0], e[1], e[0], e[2]) == r4.r[0, 1, 0, 2]
    x, y, z, u = rng.normal(size=(4, 3))
    brute = sum(r4.r[i, j, k, l] * x[i] * y[j] * z[k] * u[l]
                for i in range(3) for j in range(3) for k in range(3) for l in range(3))
    assert r4(x, y, z, u) == pytest.approx(brute, rel=1e-12)


def test_closed_forms_vanish_for_constant_metric():
    rep = closed_form_components(flat_metric(), (0.0, 0.0, 0.0))
    for reading in rep.readings.values():
        assert all(v == 0.0 for v in reading.values())
    assert rep.flagged == []


def test_closed_forms_on_example():
    rep = closed_form_components(example_metric(), EXAMPLE_POINT)
    assert rep.values["R1212"] == pytest.approx(-1 / 9, abs=1e-15)
    # the printed forms reproduce the diagonal components but give zero
    # off-diagonal ones, which the pipeline contradicts
    for k in ("R1212", "R1313", "R2323"):
        assert rep.deviation[k] <= 1e-12
    assert sorted(rep.flagged) == ["R1213", "R1223", "R1323"]


def test_closed_form_report_flags_every_mismatch(rng):
    for _ in range(5):
        m = random_poly_metric(rng, scale=0.1)
        rep = closed_form_components(m, random_box_point(rng))
        for k in SIX_LABELS:
            assert (rep.deviation[k] <= rep.tol) == (k not in rep.flagged)
        assert set(rep.pipeline) == set(SIX_LABELS)


def test_metric_derivative_caching_is_per_instance():
    m = CirculantMetric.from_strings("X1^2 + 5", "X2")
    assert m.grad_exprs is m.grad_exprs
    hA, _ = m.hessians((1.0, 2.0, 3.0))
    np.testing.assert_array_equal(hA, [[2, 0, 0], [0, 0, 0], [0, 0, 0]])
