"""Scalar expressions in the coordinates X1, X2, X3.

Expressions are immutable trees. They can be parsed from text, printed back,
evaluated at a point (scalars or numpy arrays of coordinates) and
differentiated exactly with respect to any coordinate.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('+' | '-') unary | power
    power   := atom ('^' INTEGER)*
    atom    := NUMBER | X1 | X2 | X3 | FUNC '(' expr ')' | '(' expr ')'
    FUNC    := sin | cos | exp | log
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

__all__ = [
    "Expr", "Const", "Var", "Neg", "Add", "Sub", "Mul", "Div", "Pow", "Func",
    "X1", "X2", "X3",
    "ExprSyntaxError", "UnknownIdentifier", "EvaluationDomainError",
    "parse", "evaluate", "diff", "fd_partial", "as_expr",
]

FUNCTIONS = ("sin", "cos", "exp", "log")


class ExprSyntaxError(ValueError):
    """Malformed expression text. ``position`` is the 0-based column."""

    def __init__(self, message: str, text: str, position: int):
        self.text = text
        self.position = position
        super().__init__(f"{message} at position {position}: {text!r}")


class UnknownIdentifier(ExprSyntaxError):
    pass


class EvaluationDomainError(ArithmeticError):
    """Division by zero or logarithm of a non-positive value."""


class Expr:
    """Base class of expression nodes.

    Arithmetic operators build new trees, folding constants where trivial.
    """

    __slots__ = ()
    precedence = 100

    def __add__(self, other):
        return add(self, as_expr(other))

    def __radd__(self, other):
        return add(as_expr(other), self)

    def __sub__(self, other):
        return sub(self, as_expr(other))

    def __rsub__(self, other):
        return sub(as_expr(other), self)

    def __mul__(self, other):
        return mul(self, as_expr(other))

    def __rmul__(self, other):
        return mul(as_expr(other), self)

    def __truediv__(self, other):
        return div(self, as_expr(other))

    def __rtruediv__(self, other):
        return div(as_expr(other), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, n: int):
        return power(self, n)

    def __call__(self, point):
        return evaluate(self, point)

    def __str__(self):
        return to_string(self)


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class Var(Expr):
    axis: int  # 1, 2 or 3

    def __post_init__(self):
        if self.axis not in (1, 2, 3):
            raise ValueError(f"axis must be 1, 2 or 3, got {self.axis}")


@dataclass(frozen=True)
class Neg(Expr):
    arg: Expr
    precedence = 3


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr
    precedence = 1


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr
    precedence = 1


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr
    precedence = 2


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr
    precedence = 2


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int
    precedence = 4

    def __post_init__(self):
        if not isinstance(self.exponent, int) or self.exponent < 0:
            raise ValueError(f"exponent must be a non-negative integer, got {self.exponent!r}")


@dataclass(frozen=True)
class Func(Expr):
    name: str
    arg: Expr

    def __post_init__(self):
        if self.name not in FUNCTIONS:
            raise ValueError(f"unknown function {self.name!r}")


X1, X2, X3 = Var(1), Var(2), Var(3)


def as_expr(value: Union[Expr, float, int, str]) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, str):
        return parse(value)
    if isinstance(value, (int, float, np.integer, np.floating)):
        return Const(float(value))
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


# -- smart constructors (constant folding only) -----------------------------

def _is_const(e: Expr, value=None) -> bool:
    return isinstance(e, Const) and (value is None or e.value == value)


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Add(a, b)


def sub(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return neg(b)
    return Sub(a, b)


def mul(a: Expr, b: Expr) -> Expr:
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(b, 1.0):
        return a
    return Div(a, b)


def power(a: Expr, n: int) -> Expr:
    if n == 0:
        return Const(1.0)
    if n == 1:
        return a
    if _is_const(a):
        return Const(a.value ** n)
    return Pow(a, n)


# -- parsing ----------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            start = pos + len(text[pos:]) - len(text[pos:].lstrip())
            raise ExprSyntaxError(f"unexpected character {text[start]!r}", text, start)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, message, pos=None):
        if pos is None:
            pos = self.peek()[2]
        return ExprSyntaxError(message, self.text, pos)

    def expect(self, value):
        kind, tok, pos = self.peek()
        if tok != value:
            found = "end of input" if kind == "end" else repr(tok)
            raise self.error(f"expected {value!r}, found {found}")
        return self.take()

    def parse(self) -> Expr:
        e = self.expr()
        kind, tok, pos = self.peek()
        if kind != "end":
            raise self.error(f"unexpected token {tok!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self):
        kind, tok, pos = self.peek()
        if kind == "op" and tok in ("+", "-"):
            self.take()
            arg = self.unary()
            return arg if tok == "+" else Neg(arg)
        return self.power()

    def power(self):
        e = self.atom()
        while self.peek()[1] == "^":
            self.take()
            kind, tok, pos = self.peek()
            if kind != "num" or not tok.isdigit():
                raise self.error("exponent must be a non-negative integer literal")
            self.take()
            e = Pow(e, int(tok))
        return e

    def atom(self):
        kind, tok, pos = self.take()
        if kind == "num":
            return Const(float(tok))
        if kind == "name":
            if tok in ("X1", "X2", "X3"):
                return Var(int(tok[1]))
            if tok in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return Func(tok, arg)
            raise UnknownIdentifier(f"unknown identifier {tok!r}", self.text, pos)
        if tok == "(":
            e = self.expr()
            if self.peek()[1] != ")":
                raise self.error(f"unclosed parenthesis opened at position {pos}")
            self.take()
            return e
        if kind == "end":
            raise self.error("unexpected end of input", pos)
        raise self.error(f"unexpected token {tok!r}", pos)


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree.

    Raises ExprSyntaxError (with the offending column) or UnknownIdentifier.
    """
    return _Parser(text).parse()


# -- printing ---------------------------------------------------------------

def _fmt_const(v: float) -> str:
    s = repr(float(v))
    if s in ("inf", "-inf", "nan"):
        raise ValueError(f"cannot print non-finite constant {v}")
    return f"({s})" if v < 0 else s


def to_string(e: Expr) -> str:
    """Print ``e`` in the parser's grammar; ``parse(to_string(e))`` is equivalent to ``e``."""
    if isinstance(e, Const):
        return _fmt_const(e.value)
    if isinstance(e, Var):
        return f"X{e.axis}"
    if isinstance(e, Neg):
        return f"-({to_string(e.arg)})"
    if isinstance(e, Func):
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, Pow):
        return f"({to_string(e.base)})^{e.exponent}"
    op = {Add: "+", Sub: "-", Mul: "*", Div: "/"}[type(e)]
    return f"({to_string(e.left)} {op} {to_string(e.right)})"


# -- evaluation -------------------------------------------------------------

def _coords(point):
    if len(point) != 3:
        raise ValueError(f"a point needs 3 coordinates, got {len(point)}")
    return tuple(np.asarray(c, dtype=float) if np.ndim(c) else float(c) for c in point)


def _eval(e: Expr, xs):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return xs[e.axis - 1]
    if isinstance(e, Add):
        return _eval(e.left, xs) + _eval(e.right, xs)
    if isinstance(e, Sub):
        return _eval(e.left, xs) - _eval(e.right, xs)
    if isinstance(e, Mul):
        return _eval(e.left, xs) * _eval(e.right, xs)
    if isinstance(e, Div):
        den = _eval(e.right, xs)
        if np.any(np.asarray(den) == 0.0):
            raise EvaluationDomainError(f"division by zero in {to_string(e)}")
        return _eval(e.left, xs) / den
    if isinstance(e, Neg):
        return -_eval(e.arg, xs)
    if isinstance(e, Pow):
        return _eval(e.base, xs) ** e.exponent
    if isinstance(e, Func):
        v = _eval(e.arg, xs)
        if e.name == "log":
            if np.any(np.asarray(v) <= 0.0):
                raise EvaluationDomainError(f"log of non-positive value in {to_string(e)}")
            return np.log(v)
        return getattr(np, e.name)(v)
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, point: Sequence) -> float | np.ndarray:
    """Evaluate ``e`` at ``point = (x1, x2, x3)``.

    Coordinates may be floats or equally shaped arrays (vectorised evaluation).
    """
    xs = _coords(point)
    out = _eval(e, xs)
    shape = np.broadcast(*[np.asarray(x) for x in xs]).shape
    if shape:
        return np.broadcast_to(np.asarray(out, dtype=float), shape).copy()
    return float(out)


# -- differentiation --------------------------------------------------------

def diff(e: Expr, axis: int) -> Expr:
    """Exact partial derivative of ``e`` with respect to X<axis>."""
    if axis not in (1, 2, 3):
        raise ValueError(f"axis must be 1, 2 or 3, got {axis}")
    if isinstance(e, Const):
        return Const(0.0)
    if isinstance(e, Var):
        return Const(1.0 if e.axis == axis else 0.0)
    if isinstance(e, Neg):
        return neg(diff(e.arg, axis))
    if isinstance(e, Add):
        return add(diff(e.left, axis), diff(e.right, axis))
    if isinstance(e, Sub):
        return sub(diff(e.left, axis), diff(e.right, axis))
    if isinstance(e, Mul):
        return add(mul(diff(e.left, axis), e.right), mul(e.left, diff(e.right, axis)))
    if isinstance(e, Div):
        da, db = diff(e.left, axis), diff(e.right, axis)
        return div(sub(mul(da, e.right), mul(e.left, db)), power(e.right, 2))
    if isinstance(e, Pow):
        if e.exponent == 0:
            return Const(0.0)
        inner = diff(e.base, axis)
        return mul(mul(Const(float(e.exponent)), power(e.base, e.exponent - 1)), inner)
    if isinstance(e, Func):
        inner = diff(e.arg, axis)
        if _is_const(inner, 0.0):
            return Const(0.0)
        outer = {
            "sin": lambda u: Func("cos", u),
            "cos": lambda u: neg(Func("sin", u)),
            "exp": lambda u: Func("exp", u),
            "log": lambda u: div(Const(1.0), u),
        }[e.name](e.arg)
        return mul(outer, inner)
    raise TypeError(f"not an expression node: {e!r}")


def fd_partial(e: Expr, point: Sequence, axis: int, h: float = 1e-5) -> float:
    """Central difference ``(e(p + h e_i) - e(p - h e_i)) / 2h``."""
    p = np.array(point, dtype=float)
    step = np.zeros(3)
    step[axis - 1] = h
    return (evaluate(e, p + step) - evaluate(e, p - step)) / (2.0 * h)
