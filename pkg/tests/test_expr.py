import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from geomq.expr import (Const, EvaluationDomainError, ExprSyntaxError, Func, UnknownIdentifier,
                        X1, X2, X3, diff, evaluate, fd_partial, parse, to_string)


@pytest.mark.parametrize("text, point, expected", [
    ("2*X1", (1, -1, -0.5), 2.0),
    ("2*X1 + X2 + X3", (1, -1, -0.5), 0.5),
    ("X1*X2", (3, 4, 0), 12.0),
    ("7", (0.3, -2, 9), 7.0),
    ("2*X1 + X2 + X3", (2, -0.5, -0.5), 3.0),
    ("-X1^2", (3, 0, 0), -9.0),
    ("2^3", (0, 0, 0), 8.0),
    ("1/2/4", (0, 0, 0), 0.125),
    ("1 - 2 - 3", (0, 0, 0), -4.0),
    ("exp(0) + log(X1) + sin(X2)*cos(X3)", (math.e, 0.0, 0.0), 2.0),
    ("  1.5e1 *\tX3 ", (0, 0, 2), 30.0),
])
def test_parse_and_evaluate(text, point, expected):
    assert evaluate(parse(text), point) == pytest.approx(expected, rel=1e-15, abs=1e-15)


def test_unclosed_parenthesis_reports_position():
    with pytest.raises(ExprSyntaxError) as exc:
        parse("2*X1 + (X2")
    assert exc.value.position == 10
    assert "unclosed parenthesis" in str(exc.value)


@pytest.mark.parametrize("text", ["", "2*", "X1 X2", "(X1))", "X1^-1", "X1^1.5", "3 $ 4", "sin X1"])
def test_syntax_errors(text):
    with pytest.raises(ExprSyntaxError):
        parse(text)


def test_unknown_identifier():
    with pytest.raises(UnknownIdentifier) as exc:
        parse("X1 + tan(X2)")
    assert exc.value.position == 5


def test_evaluation_domain_errors():
    with pytest.raises(EvaluationDomainError):
        evaluate(parse("1/(X1 - 1)"), (1, 0, 0))
    with pytest.raises(EvaluationDomainError):
        evaluate(parse("log(X2)"), (1, -1, 0))


def test_vectorised_evaluation():
    xs = np.linspace(0.1, 1.0, 7)
    out = evaluate(parse("X1*X1 + X2"), (xs, 0.0, 1.0))
    assert out.shape == (7,)
    np.testing.assert_allclose(out, xs ** 2)


def test_diff_examples():
    assert diff(parse("2*X1 + X2 + X3"), 1) == Const(2.0)
    assert diff(Const(3.5), 2) == Const(0.0)
    assert evaluate(diff(X1 * X1, 1), (3, 0, 0)) == 6.0


def test_second_partials_compose():
    e = parse("X1^3*X2")
    assert evaluate(diff(diff(e, 1), 1), (2, 5, 0)) == pytest.approx(6 * 2 * 5)
    assert evaluate(diff(diff(e, 1), 2), (2, 5, 0)) == pytest.approx(3 * 4)


def test_fd_partial_examples():
    assert fd_partial(parse("2*X1"), (1, 0, 0), 1, 1e-5) == pytest.approx(2.0, abs=1e-9)
    e = X1 * X1
    assert fd_partial(e, (3, 0, 0), 1, 1e-5) == pytest.approx(evaluate(diff(e, 1), (3, 0, 0)), abs=1e-8)
    s = Func("sin", X1)
    exact = evaluate(diff(s, 1), (0.7, 0, 0))
    assert exact == pytest.approx(math.cos(0.7), rel=1e-15)
    assert fd_partial(s, (0.7, 0, 0), 1, 1e-5) == pytest.approx(exact, abs=1e-8)


# -- random expressions -------------------------------------------------------------

leaves = st.one_of(
    st.sampled_from([X1, X2, X3]),
    st.floats(-3, 3, allow_nan=False).map(lambda v: Const(round(v, 3))),
)


def _extend(children):
    return st.one_of(
        st.tuples(children, children).map(lambda t: t[0] + t[1]),
        st.tuples(children, children).map(lambda t: t[0] - t[1]),
        st.tuples(children, children).map(lambda t: t[0] * t[1]),
        # denominators kept in [1, 3]
        st.tuples(children, children).map(lambda t: t[0] / (Const(2.0) + Func("cos", t[1]))),
        st.tuples(children, st.integers(0, 3)).map(lambda t: t[0] ** t[1]),
        children.map(lambda c: -c),
        children.map(lambda c: Func("sin", c)),
        children.map(lambda c: Func("cos", c)),
        children.map(lambda c: Func("exp", Func("sin", c))),
        children.map(lambda c: Func("log", Const(2.0) + Func("cos", c))),
    )


exprs = st.recursive(leaves, _extend, max_leaves=8)

POINTS = np.random.default_rng(5).uniform(-1, 1, size=(100, 3))


@settings(max_examples=60, deadline=None)
@given(exprs)
def test_print_parse_round_trip(e):
    back = parse(to_string(e))
    for p in POINTS:
        assert evaluate(back, p) == pytest.approx(evaluate(e, p), rel=1e-12, abs=1e-12)


@settings(max_examples=60, deadline=None)
@given(exprs, st.sampled_from([1, 2, 3]))
def test_fd_agrees_with_symbolic_derivative(e, axis):
    d = diff(e, axis)
    for p in POINTS:
        exact = evaluate(d, p)
        assert abs(fd_partial(e, p, axis, 1e-5) - exact) <= 1e-6 * (1 + abs(exact))


@settings(max_examples=40, deadline=None)
@given(exprs, exprs, st.floats(-5, 5, allow_nan=False), st.sampled_from([1, 2, 3]))
def test_diff_is_linear(e1, e2, a, axis):
    lhs = diff(Const(a) * e1 + e2, axis)
    for p in POINTS[:20]:
        rhs = a * evaluate(diff(e1, axis), p) + evaluate(diff(e2, axis), p)
        assert evaluate(lhs, p) == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(exprs, st.sampled_from([1, 2, 3]), st.sampled_from([1, 2, 3]))
def test_mixed_partials_commute(e, i, j):
    dij = diff(diff(e, i), j)
    dji = diff(diff(e, j), i)
    for p in POINTS[:20]:
        a, b = evaluate(dij, p), evaluate(dji, p)
        assert abs(a - b) <= 1e-10 * max(1.0, abs(a))
