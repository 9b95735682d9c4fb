"""Immutable expression trees.

Nodes are frozen dataclasses, structurally comparable and hashable, so
expressions can be shared freely between threads and used as dict keys.
Construction never rewrites anything: ``a/b`` and ``a*b^-1`` stay distinct
trees until `simplify` is asked for.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

SYMBOL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

#: Functions understood by the evaluator and the derivative rules.
FUNCTIONS = ("sin", "cos", "tan", "ln", "exp", "sqrt", "abs")

BINARY_OPS = ("+", "-", "*", "/", "^")


class Expr:
    """Base class for expression nodes; supports Python operator sugar."""

    __slots__ = ()

    def __add__(self, other):
        return Bin("+", self, as_expr(other))

    def __radd__(self, other):
        return Bin("+", as_expr(other), self)

    def __sub__(self, other):
        return Bin("-", self, as_expr(other))

    def __rsub__(self, other):
        return Bin("-", as_expr(other), self)

    def __mul__(self, other):
        return Bin("*", self, as_expr(other))

    def __rmul__(self, other):
        return Bin("*", as_expr(other), self)

    def __truediv__(self, other):
        return Bin("/", self, as_expr(other))

    def __rtruediv__(self, other):
        return Bin("/", as_expr(other), self)

    def __pow__(self, other):
        return Bin("^", self, as_expr(other))

    def __rpow__(self, other):
        return Bin("^", as_expr(other), self)

    def __neg__(self):
        return Neg(self)

    def __str__(self):
        return to_str(self)


@dataclass(frozen=True, slots=True)
class Num(Expr):
    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True, slots=True)
class Sym(Expr):
    name: str

    def __post_init__(self):
        if not SYMBOL_RE.match(self.name):
            raise ValueError(f"invalid symbol name: {self.name!r}")


@dataclass(frozen=True, slots=True)
class Bin(Expr):
    op: str
    left: Expr
    right: Expr

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise ValueError(f"unknown binary operator: {self.op!r}")


@dataclass(frozen=True, slots=True)
class Neg(Expr):
    arg: Expr


@dataclass(frozen=True, slots=True)
class Call(Expr):
    fn: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


def as_expr(value) -> Expr:
    """Coerce a number, symbol name, or Expr into an Expr."""
    if isinstance(value, Expr):
        return value
    if isinstance(value, (int, float)):
        return Num(value)
    if isinstance(value, str):
        from .parser import parse

        return parse(value)
    raise TypeError(f"cannot convert {type(value).__name__} to Expr")


def sym(name: str) -> Sym:
    return Sym(name)


def num(value) -> Num:
    return Num(value)


def call(fn, *args) -> Call:
    return Call(fn, tuple(as_expr(a) for a in args))


def free_symbols(e: Expr) -> set:
    """Names of all symbols occurring in `e` (including `pi`)."""
    out = set()
    stack = [e]
    while stack:
        n = stack.pop()
        if isinstance(n, Sym):
            out.add(n.name)
        elif isinstance(n, Bin):
            stack.append(n.left)
            stack.append(n.right)
        elif isinstance(n, Neg):
            stack.append(n.arg)
        elif isinstance(n, Call):
            stack.extend(n.args)
    return out


def format_number(x: float) -> str:
    if x == int(x) and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


# Printing precedence levels; higher binds tighter.
_PREC_ADD = 1
_PREC_MUL = 2
_PREC_NEG = 3
_PREC_POW = 4
_PREC_ATOM = 5


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        if e.op in "+-":
            return _PREC_ADD
        if e.op in "*/":
            return _PREC_MUL
        return _PREC_POW
    if isinstance(e, Neg):
        return _PREC_NEG
    if isinstance(e, Num) and e.value < 0:
        return _PREC_NEG
    return _PREC_ATOM


def to_str(e: Expr) -> str:
    """Canonical printed form; `parse(to_str(e))` reproduces the value."""
    if isinstance(e, Num):
        return format_number(e.value)
    if isinstance(e, Sym):
        return e.name
    if isinstance(e, Neg):
        inner = to_str(e.arg)
        if _prec(e.arg) < _PREC_NEG:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(to_str(a) for a in e.args)})"
    if isinstance(e, Bin):
        lp, rp = _prec(e.left), _prec(e.right)
        ls, rs = to_str(e.left), to_str(e.right)
        if e.op in "+-":
            if lp < _PREC_ADD:
                ls = f"({ls})"
            # right side needs parens if it is +/- (left associativity)
            if rp <= _PREC_ADD:
                rs = f"({rs})"
            return f"{ls} {e.op} {rs}"
        if e.op in "*/":
            if lp < _PREC_MUL:
                ls = f"({ls})"
            if rp <= _PREC_MUL if e.op == "/" else rp < _PREC_MUL:
                rs = f"({rs})"
            return f"{ls}{e.op}{rs}"
        # power: right associative, binds tighter than unary minus
        if lp <= _PREC_POW:
            ls = f"({ls})"
        if rp < _PREC_POW:
            rs = f"({rs})"
        return f"{ls}^{rs}"
    raise TypeError(f"not an Expr: {e!r}")
