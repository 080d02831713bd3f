"""Scalar coefficient expressions of one variable ``t``.

A small recursive-descent parser, a vectorised complex evaluator and an exact
symbolic differentiator. Trees are immutable and hashable.

Grammar::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?
    atom   := NUMBER | NUMBER 'j' | 't' | 'pi' | NAME | FUNC '(' expr ')' | '(' expr ')'

Every other identifier is a named parameter (e.g. ``lambda``) that must be
bound at evaluation time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Param",
    "BinOp",
    "Func",
    "ExprSyntaxError",
    "UnknownIdentifierError",
    "EvaluationError",
    "FUNCTIONS",
    "parse",
    "evaluate",
    "differentiate",
    "to_string",
    "parameters",
]

FUNCTIONS = ("sqrt", "sin", "cos", "exp", "log", "neg")

_PREC_ADD, _PREC_MUL, _PREC_NEG, _PREC_POW, _PREC_ATOM = 1, 2, 3, 4, 5


class ExprSyntaxError(ValueError):
    def __init__(self, message: str, position: int, source: str):
        self.position = position
        self.source = source
        super().__init__(f"{message} at position {position}: {source!r}")


class UnknownIdentifierError(ValueError):
    def __init__(self, name: str, position: int):
        self.name = name
        self.position = position
        super().__init__(f"unknown identifier {name!r} at position {position}")


class EvaluationError(ArithmeticError):
    pass


class Expr:
    """Base node. Subclasses are frozen dataclasses."""

    def __str__(self) -> str:
        return to_string(self)

    def __call__(self, t, params: Mapping[str, complex] | None = None):
        return evaluate(self, t, params)

    def diff(self) -> "Expr":
        return differentiate(self)


@dataclass(frozen=True, eq=True, repr=True)
class Const(Expr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))


@dataclass(frozen=True, eq=True, repr=True)
class Var(Expr):
    pass


@dataclass(frozen=True, eq=True, repr=True)
class Param(Expr):
    name: str


@dataclass(frozen=True, eq=True, repr=True)
class BinOp(Expr):
    op: str  # one of + - * / ^
    left: Expr
    right: Expr


@dataclass(frozen=True, eq=True, repr=True)
class Func(Expr):
    name: str  # one of FUNCTIONS
    arg: Expr


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)(?P<imag>j)?"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))"
)


def _tokenize(source: str):
    tokens = []
    pos = 0
    n = len(source)
    while pos < n:
        if source[pos:].strip() == "":
            break
        m = _TOKEN_RE.match(source, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(source[pos:]) - len(source[pos:].lstrip()))
            raise ExprSyntaxError(f"unexpected character {source[bad]!r}", bad, source)
        start = m.start(m.lastgroup) if m.lastgroup != "imag" else m.start("num")
        if m.group("num") is not None:
            val = float(m.group("num"))
            tokens.append(("num", 1j * val if m.group("imag") else val, start))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, len(source)))
    return tokens


class _Parser:
    def __init__(self, source: str, params):
        self.source = source
        self.tokens = _tokenize(source)
        self.i = 0
        self.params = None if params is None else set(params)

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            found = "end of input" if kind == "end" else repr(val)
            raise ExprSyntaxError(f"expected {op!r}, found {found}", pos, self.source)

    def parse(self) -> Expr:
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ExprSyntaxError(f"unexpected token {val!r}", pos, self.source)
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            left = BinOp(op, left, self.term())
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            left = BinOp(op, left, self.unary())
        return left

    def unary(self) -> Expr:
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            nxt = self.peek()
            # a literal directly after '-' (and not raised to a power) folds into the constant
            if nxt[0] == "num" and not (self.tokens[self.i + 1][:2] == ("op", "^")):
                self.take()
                return Const(-nxt[1])
            return Func("neg", self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return BinOp("^", base, self.unary())
        return base

    def atom(self) -> Expr:
        kind, val, pos = self.take()
        if kind == "num":
            return Const(val)
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if val not in FUNCTIONS:
                    raise UnknownIdentifierError(val, pos)
                self.take()
                arg = self.expr()
                self.expect_op(")")
                return Func(val, arg)
            if val == "t":
                return Var()
            if val == "pi":
                return Const(math.pi)
            if val in FUNCTIONS:
                raise ExprSyntaxError(f"function {val!r} needs an argument", pos, self.source)
            if self.params is not None and val not in self.params:
                raise UnknownIdentifierError(val, pos)
            return Param(val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", pos, self.source)


def parse(source: str, params=None) -> Expr:
    """Parse ``source`` into an expression tree.

    ``params`` optionally restricts the allowed parameter names; any other
    identifier then raises :class:`UnknownIdentifierError`.
    """
    if isinstance(source, Expr):
        return source
    return _Parser(source, params).parse()


# ---------------------------------------------------------------------------
# printing


def _fmt_number(z: complex) -> str:
    def real(x: float) -> str:
        if x == int(x) and abs(x) < 1e15:
            return str(int(x))
        return repr(x)

    if z.imag == 0:
        return real(z.real)
    if z.real == 0:
        return real(z.imag) + "j"
    return f"({real(z.real)}{'+' if z.imag >= 0 else '-'}{real(abs(z.imag))}j)"


def _node_prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return {"+": _PREC_ADD, "-": _PREC_ADD, "*": _PREC_MUL, "/": _PREC_MUL, "^": _PREC_POW}[e.op]
    if isinstance(e, Func) and e.name == "neg":
        return _PREC_NEG
    if isinstance(e, Const):
        v = e.value
        if v.real != 0 and v.imag != 0:
            return _PREC_ADD
        if v.real < 0 or v.imag < 0:
            return _PREC_NEG
    return _PREC_ATOM


def to_string(e: Expr) -> str:
    """Render with the minimum parentheses needed to re-parse the same tree."""

    def wrap(child: Expr, min_prec: int) -> str:
        s = to_string(child)
        return f"({s})" if _node_prec(child) < min_prec else s

    if isinstance(e, Const):
        return _fmt_number(e.value)
    if isinstance(e, Var):
        return "t"
    if isinstance(e, Param):
        return e.name
    if isinstance(e, Func):
        if e.name == "neg":
            arg = e.arg
            # "-2" would re-parse as a negative literal, "-2^x" would not
            if isinstance(arg, Const) or _node_prec(arg) < _PREC_NEG:
                return f"-({to_string(arg)})"
            return "-" + to_string(arg)
        return f"{e.name}({to_string(e.arg)})"
    if isinstance(e, BinOp):
        p = _node_prec(e)
        if e.op == "^":
            base = wrap(e.left, _PREC_ATOM)
            return f"{base}^{wrap(e.right, _PREC_NEG)}"
        return f"{wrap(e.left, p)}{e.op}{wrap(e.right, p + 1)}"
    raise TypeError(f"not an expression node: {e!r}")


def parameters(e: Expr) -> set[str]:
    if isinstance(e, Param):
        return {e.name}
    if isinstance(e, BinOp):
        return parameters(e.left) | parameters(e.right)
    if isinstance(e, Func):
        return parameters(e.arg)
    return set()


# ---------------------------------------------------------------------------
# evaluation


def _principal(z):
    # adding +0j turns a signed -0.0 imaginary part into +0.0 so cuts follow
    # the principal branch from above
    return np.asarray(z, dtype=complex) + 0j


def _ipow(base, n: int):
    if n < 0:
        if np.any(base == 0):
            raise EvaluationError("division by zero in negative power")
        return 1.0 / _ipow(base, -n)
    result = np.ones_like(base)
    b = base
    while n:
        if n & 1:
            result = result * b
        n >>= 1
        if n:
            b = b * b
    return result


def _eval(e: Expr, t, params):
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return t
    if isinstance(e, Param):
        try:
            return np.asarray(params[e.name], dtype=complex)
        except KeyError:
            raise EvaluationError(f"unbound parameter {e.name!r}") from None
    if isinstance(e, Func):
        x = _eval(e.arg, t, params)
        if e.name == "neg":
            return -x
        if e.name == "sqrt":
            return np.sqrt(_principal(x))
        if e.name == "sin":
            return np.sin(x)
        if e.name == "cos":
            return np.cos(x)
        if e.name == "exp":
            return np.exp(x)
        if e.name == "log":
            x = _principal(x)
            if np.any(x == 0):
                raise EvaluationError("log of zero")
            return np.log(x)
        raise EvaluationError(f"unknown function {e.name!r}")
    if isinstance(e, BinOp):
        a = _eval(e.left, t, params)
        if e.op == "^" and isinstance(e.right, Const):
            p = e.right.value
            if p.imag == 0 and p.real == int(p.real) and abs(p.real) <= 64:
                return _ipow(np.asarray(a, dtype=complex), int(p.real))
        b = _eval(e.right, t, params)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if np.any(np.asarray(b) == 0):
                raise EvaluationError("division by zero")
            return a / b
        if e.op == "^":
            a = _principal(a)
            if np.any((a == 0) & (np.real(b) < 0)):
                raise EvaluationError("division by zero in negative power")
            with np.errstate(invalid="ignore", divide="ignore"):
                return np.where(a == 0, np.where(np.asarray(b) == 0, 1.0 + 0j, 0j), np.power(a, b))
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr | str, t, params: Mapping[str, complex] | None = None):
    """Evaluate ``e`` at ``t`` (scalar or array) with complex arithmetic.

    Scalars come back as Python ``complex``; arrays broadcast against array
    valued parameters.
    """
    e = parse(e)
    t_arr = np.asarray(t, dtype=complex)
    with np.errstate(all="ignore"):
        out = np.asarray(_eval(e, t_arr, params or {}), dtype=complex)
    shape = np.broadcast_shapes(out.shape, t_arr.shape)
    out = np.broadcast_to(out, shape)
    if out.ndim == 0:
        return complex(out)
    return np.array(out)


# ---------------------------------------------------------------------------
# differentiation

_ZERO, _ONE, _TWO = Const(0), Const(1), Const(2)


def _is(e: Expr, v: complex) -> bool:
    return isinstance(e, Const) and e.value == v


def _add(a, b):
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value + b.value)
    return BinOp("+", a, b)


def _sub(a, b):
    if _is(b, 0):
        return a
    if _is(a, 0):
        return _neg(b)
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value - b.value)
    return BinOp("-", a, b)


def _mul(a, b):
    if _is(a, 0) or _is(b, 0):
        return _ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Const) and isinstance(b, Const):
        return Const(a.value * b.value)
    return BinOp("*", a, b)


def _div(a, b):
    if _is(a, 0):
        return _ZERO
    if _is(b, 1):
        return a
    return BinOp("/", a, b)


def _neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Func) and a.name == "neg":
        return a.arg
    return Func("neg", a)


def _pow(a, b):
    if _is(b, 1):
        return a
    if _is(b, 0):
        return _ONE
    return BinOp("^", a, b)


def _depends_on_t(e: Expr) -> bool:
    if isinstance(e, Var):
        return True
    if isinstance(e, BinOp):
        return _depends_on_t(e.left) or _depends_on_t(e.right)
    if isinstance(e, Func):
        return _depends_on_t(e.arg)
    return False


def differentiate(e: Expr | str) -> Expr:
    """Exact derivative with respect to ``t`` (light constant folding only)."""
    e = parse(e)
    if isinstance(e, (Const, Param)):
        return _ZERO
    if isinstance(e, Var):
        return _ONE
    if isinstance(e, Func):
        u = e.arg
        du = differentiate(u)
        if _is(du, 0):
            return _ZERO
        if e.name == "neg":
            return _neg(du)
        if e.name == "sqrt":
            return _div(du, _mul(_TWO, e))
        if e.name == "sin":
            return _mul(Func("cos", u), du)
        if e.name == "cos":
            return _neg(_mul(Func("sin", u), du))
        if e.name == "exp":
            return _mul(e, du)
        if e.name == "log":
            return _div(du, u)
        raise ValueError(f"unknown function {e.name!r}")
    if isinstance(e, BinOp):
        a, b = e.left, e.right
        da, db = differentiate(a), differentiate(b)
        if e.op == "+":
            return _add(da, db)
        if e.op == "-":
            return _sub(da, db)
        if e.op == "*":
            return _add(_mul(da, b), _mul(a, db))
        if e.op == "/":
            return _div(_sub(_mul(da, b), _mul(a, db)), _pow(b, _TWO))
        if e.op == "^":
            if not _depends_on_t(b):
                # d(a^n) = n a^(n-1) a'
                return _mul(_mul(b, _pow(a, _sub(b, _ONE))), da)
            # a^b (b' log a + b a'/a)
            return _mul(e, _add(_mul(db, Func("log", a)), _div(_mul(b, da), a)))
    raise TypeError(f"not an expression node: {e!r}")
