"""Symbolic expressions for the defining functions of a problem.

Expressions are small immutable trees.  They are parsed from strings such as
``"-x1 + 0.5*x1^2 - x2^2"``, evaluated on floats or on numpy arrays
(elementwise), and differentiated exactly by rewrite rules.

Grammar (whitespace is ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := atom ['^' integer]
    atom   := number | 'x' integer | '(' expr ')' | func '(' expr ')'
    func   := sin | cos | exp | log | sqrt

Unary minus binds looser than ``^``, so ``-x1^2`` means ``-(x1^2)``.
Exponents are integer literals; ``**`` is rejected.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DomainError,
    ExprSyntaxError,
    UnknownIdentifierError,
    VariableIndexError,
)

FUNCTIONS = ("sin", "cos", "exp", "log", "sqrt")


class Expr:
    """Base class of all expression nodes."""

    __slots__ = ()

    def __call__(self, x):
        return evaluate(self, x)

    def _eval(self, x):  # pragma: no cover - abstract
        raise NotImplementedError

    def diff(self, j: int) -> "Expr":
        """Exact partial derivative with respect to ``x_j`` (1-based)."""
        raise NotImplementedError  # pragma: no cover

    def max_index(self) -> int:
        raise NotImplementedError  # pragma: no cover

    @property
    def precedence(self) -> int:
        return 100

    def _wrap(self, child: "Expr", min_prec: int) -> str:
        s = str(child)
        return f"({s})" if child.precedence < min_prec else s


@dataclass(frozen=True, slots=True)
class Const(Expr):
    value: float

    def _eval(self, x):
        return self.value

    def diff(self, j):
        return ZERO

    def max_index(self):
        return 0

    def __str__(self):
        s = repr(float(self.value))
        if s.endswith(".0"):
            s = s[:-2]
        return f"({s})" if self.value < 0 else s


@dataclass(frozen=True, slots=True)
class Var(Expr):
    index: int

    def _eval(self, x):
        return x[self.index - 1]

    def diff(self, j):
        return ONE if j == self.index else ZERO

    def max_index(self):
        return self.index

    def __str__(self):
        return f"x{self.index}"


@dataclass(frozen=True, slots=True)
class Add(Expr):
    left: Expr
    right: Expr

    def _eval(self, x):
        return self.left._eval(x) + self.right._eval(x)

    def diff(self, j):
        return add(self.left.diff(j), self.right.diff(j))

    def max_index(self):
        return max(self.left.max_index(), self.right.max_index())

    @property
    def precedence(self):
        return 10

    def __str__(self):
        return f"{self._wrap(self.left, 10)} + {self._wrap(self.right, 11)}"


@dataclass(frozen=True, slots=True)
class Sub(Expr):
    left: Expr
    right: Expr

    def _eval(self, x):
        return self.left._eval(x) - self.right._eval(x)

    def diff(self, j):
        return sub(self.left.diff(j), self.right.diff(j))

    def max_index(self):
        return max(self.left.max_index(), self.right.max_index())

    @property
    def precedence(self):
        return 10

    def __str__(self):
        return f"{self._wrap(self.left, 10)} - {self._wrap(self.right, 11)}"


@dataclass(frozen=True, slots=True)
class Mul(Expr):
    left: Expr
    right: Expr

    def _eval(self, x):
        return self.left._eval(x) * self.right._eval(x)

    def diff(self, j):
        return add(mul(self.left.diff(j), self.right), mul(self.left, self.right.diff(j)))

    def max_index(self):
        return max(self.left.max_index(), self.right.max_index())

    @property
    def precedence(self):
        return 20

    def __str__(self):
        return f"{self._wrap(self.left, 20)}*{self._wrap(self.right, 21)}"


@dataclass(frozen=True, slots=True)
class Div(Expr):
    left: Expr
    right: Expr

    def _eval(self, x):
        den = self.right._eval(x)
        if np.any(den == 0):
            raise DomainError(f"division by zero in {self}")
        return self.left._eval(x) / den

    def diff(self, j):
        # (u/v)' = u'/v - u v' / v^2
        u, v = self.left, self.right
        return sub(div(u.diff(j), v), div(mul(u, v.diff(j)), power(v, 2)))

    def max_index(self):
        return max(self.left.max_index(), self.right.max_index())

    @property
    def precedence(self):
        return 20

    def __str__(self):
        return f"{self._wrap(self.left, 20)}/{self._wrap(self.right, 21)}"


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr

    def _eval(self, x):
        return -self.arg._eval(x)

    def diff(self, j):
        return neg(self.arg.diff(j))

    def max_index(self):
        return self.arg.max_index()

    @property
    def precedence(self):
        return 15

    def __str__(self):
        return f"-{self._wrap(self.arg, 16)}"


@dataclass(frozen=True, slots=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def _eval(self, x):
        b = self.base._eval(x)
        if self.exponent < 0:
            if np.any(b == 0):
                raise DomainError(f"zero raised to a negative power in {self}")
            return 1.0 / b ** (-self.exponent)
        return b**self.exponent

    def diff(self, j):
        k = self.exponent
        return mul(mul(Const(float(k)), power(self.base, k - 1)), self.base.diff(j))

    def max_index(self):
        return self.base.max_index()

    @property
    def precedence(self):
        return 30

    def __str__(self):
        return f"{self._wrap(self.base, 31)}^{self.exponent}"


@dataclass(frozen=True, slots=True)
class Func(Expr):
    name: str
    arg: Expr

    def _eval(self, x):
        a = self.arg._eval(x)
        if self.name == "log" and np.any(a <= 0):
            raise DomainError(f"log of a non-positive number in {self}")
        if self.name == "sqrt" and np.any(a < 0):
            raise DomainError(f"sqrt of a negative number in {self}")
        return _NUMPY_FUNCS[self.name](a)

    def diff(self, j):
        u = self.arg
        du = u.diff(j)
        if self.name == "sin":
            outer = func("cos", u)
        elif self.name == "cos":
            outer = neg(func("sin", u))
        elif self.name == "exp":
            outer = self
        elif self.name == "log":
            return div(du, u)
        else:  # sqrt
            return div(du, mul(Const(2.0), self))
        return mul(outer, du)

    def max_index(self):
        return self.arg.max_index()

    def __str__(self):
        return f"{self.name}({self.arg})"


_NUMPY_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log, "sqrt": np.sqrt}

ZERO = Const(0.0)
ONE = Const(1.0)


# Smart constructors: constant folding only, no canonicalisation.

def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


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
        return ZERO
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Mul(a, b)


def div(a: Expr, b: Expr) -> Expr:
    if _is_const(b, 1.0):
        return a
    if _is_const(a, 0.0) and not _is_const(b, 0.0):
        return ZERO
    if _is_const(a) and _is_const(b) and b.value != 0:
        return Const(a.value / b.value)
    return Div(a, b)


def neg(a: Expr) -> Expr:
    if _is_const(a):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def power(a: Expr, k: int) -> Expr:
    if k == 0:
        return ONE
    if k == 1:
        return a
    if _is_const(a) and (k > 0 or a.value != 0):
        return Const(float(a.value) ** k)
    return Pow(a, int(k))


def func(name: str, a: Expr) -> Expr:
    if _is_const(a):
        try:
            return Const(float(Func(name, a)._eval(())))
        except DomainError:
            pass
    return Func(name, a)


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>\*\*|[-+*/^()])"
    r")"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            raise ExprSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        start = m.start(kind)
        value = m.group(kind)
        if value == "**":
            raise ExprSyntaxError("'**' is not accepted, use '^'", start)
        tokens.append((kind, value, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, n):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, v, pos = self.take()
        if v != value:
            shown = repr(v) if kind != "end" else "end of input"
            raise ExprSyntaxError(f"expected {value!r}, found {shown}", pos)

    def parse(self):
        e = self.expr()
        kind, v, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {v!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            e = add(e, rhs) if op == "+" else sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/"):
            op = self.take()[1]
            rhs = self.unary()
            e = mul(e, rhs) if op == "*" else div(e, rhs)
        return e

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return neg(self.unary())
        return self.factor()

    def factor(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            sign = 1
            if self.peek()[1] in ("-", "+"):
                sign = -1 if self.take()[1] == "-" else 1
            kind, v, pos = self.take()
            if kind != "number" or not v.isdigit():
                raise ExprSyntaxError("exponent must be an integer literal", pos)
            base = power(base, sign * int(v))
        return base

    def atom(self):
        kind, v, pos = self.take()
        if kind == "number":
            return Const(float(v))
        if v == "(":
            e = self.expr()
            self.expect(")")
            return e
        if kind == "ident":
            m = re.fullmatch(r"x(\d+)", v)
            if m:
                idx = int(m.group(1))
                if not 1 <= idx <= self.n:
                    raise VariableIndexError(
                        f"variable {v} out of range for dimension {self.n}", pos
                    )
                return Var(idx)
            if v in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return func(v, arg)
            raise UnknownIdentifierError(f"unknown identifier {v!r}", pos)
        shown = repr(v) if kind != "end" else "end of input"
        raise ExprSyntaxError(f"unexpected {shown}", pos)


def parse(text: str, n: int) -> Expr:
    """Parse ``text`` into an expression over variables ``x1..xn``."""
    return _Parser(text, n).parse()


# ---------------------------------------------------------------------------
# Evaluation and derivatives

def evaluate(e: Expr, x):
    """Evaluate ``e`` at ``x``.

    ``x`` is a sequence of floats, or a sequence of equally shaped numpy
    arrays for elementwise evaluation on a grid.  Raises DomainError when an
    operation leaves its domain.
    """
    if e.max_index() > len(x):
        raise ValueError(f"point has dimension {len(x)}, expression uses x{e.max_index()}")
    with np.errstate(all="ignore"):
        value = e._eval(x)
    if np.ndim(value) == 0:
        value = float(value)
        if not np.isfinite(value):
            raise DomainError(f"non-finite value {value} for {e}")
    return value


def gradient(e: Expr, n: int) -> tuple[Expr, ...]:
    return tuple(e.diff(j) for j in range(1, n + 1))


def hessian(e: Expr, n: int) -> tuple[tuple[Expr, ...], ...]:
    """Matrix of exact second partials.

    Only the upper triangle is differentiated; the lower triangle reuses the
    same nodes, so every evaluation is exactly symmetric.
    """
    grad = gradient(e, n)
    rows = [[ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            rows[i][j] = rows[j][i] = grad[i].diff(j + 1)
    return tuple(tuple(r) for r in rows)


def evaluate_vector(exprs: Sequence[Expr], x) -> np.ndarray:
    return np.array([evaluate(e, x) for e in exprs], dtype=float)


def evaluate_matrix(rows: Sequence[Sequence[Expr]], x) -> np.ndarray:
    return np.array([[evaluate(e, x) for e in row] for row in rows], dtype=float)


# ---------------------------------------------------------------------------
# Compilation to Python callables (same semantics as ``evaluate``, faster)

def _checked_div(a, b):
    if b == 0:
        raise DomainError("division by zero")
    return a / b


def _checked_log(a):
    if a <= 0:
        raise DomainError("log of a non-positive number")
    return math.log(a)


def _checked_sqrt(a):
    if a < 0:
        raise DomainError("sqrt of a negative number")
    return math.sqrt(a)


def _checked_negpow(b, k):
    if b == 0:
        raise DomainError("zero raised to a negative power")
    return 1.0 / b**k


_COMPILE_NS = {
    "_div": _checked_div,
    "_log": _checked_log,
    "_sqrt": _checked_sqrt,
    "_negpow": _checked_negpow,
    "_sin": math.sin,
    "_cos": math.cos,
    "_exp": math.exp,
}


def to_source(e: Expr) -> str:
    """Python source for ``e`` reading variables from a sequence named ``x``."""
    if isinstance(e, Const):
        return f"({float(e.value)!r})"
    if isinstance(e, Var):
        return f"x[{e.index - 1}]"
    if isinstance(e, (Add, Sub, Mul)):
        op = {Add: "+", Sub: "-", Mul: "*"}[type(e)]
        return f"({to_source(e.left)} {op} {to_source(e.right)})"
    if isinstance(e, Div):
        return f"_div({to_source(e.left)}, {to_source(e.right)})"
    if isinstance(e, Neg):
        return f"(-{to_source(e.arg)})"
    if isinstance(e, Pow):
        if e.exponent < 0:
            return f"_negpow({to_source(e.base)}, {-e.exponent})"
        return f"({to_source(e.base)})**{e.exponent}"
    if isinstance(e, Func):
        return f"_{e.name}({to_source(e.arg)})"
    raise TypeError(type(e))


def compile_array(exprs, shape=None):
    """Compile expressions into one callable ``x -> np.ndarray`` on a float point.

    Raises DomainError where ``evaluate`` would, and on overflow.
    """
    src = "lambda x: [" + ", ".join(to_source(e) for e in exprs) + "]"
    fn = eval(src, dict(_COMPILE_NS))  # noqa: S307 - source is generated from a parsed tree

    def call(x):
        xs = [float(v) for v in x]
        try:
            out = np.array(fn(xs), dtype=float)
        except (OverflowError, ValueError) as err:
            raise DomainError(str(err)) from None
        if not np.isfinite(out).all():
            raise DomainError("non-finite value")
        return out if shape is None else out.reshape(shape)

    return call
