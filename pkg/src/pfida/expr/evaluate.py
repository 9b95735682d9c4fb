"""Numeric evaluation of expression trees.

Evaluation fails loudly: every symbol must be bound (`pi` is the single
reserved name), and leaving the real domain raises instead of returning
NaN.  `compile_expr` turns a tree into a plain Python closure once, for
use in inner loops (simulation, sampling grids).
"""

from __future__ import annotations

import math

from ..errors import EvalDomainError, UnboundSymbolError
from .nodes import Bin, Call, Expr, Neg, Num, Sym

Bindings = dict  # symbol name -> float


def _ln(x):
    if x <= 0.0:
        raise EvalDomainError(f"ln of non-positive value {x}")
    return math.log(x)


def _sqrt(x):
    if x < 0.0:
        raise EvalDomainError(f"sqrt of negative value {x}")
    return math.sqrt(x)


_FUNCS = {
    "sin": math.sin,
    "cos": math.cos,
    "tan": math.tan,
    "ln": _ln,
    "exp": math.exp,
    "sqrt": _sqrt,
    "abs": abs,
}


def eval_expr(e: Expr, bindings: Bindings) -> float:
    """Evaluate `e` with all symbols bound to reals."""
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Sym):
        if e.name in bindings:
            return float(bindings[e.name])
        if e.name == "pi":
            return math.pi
        raise UnboundSymbolError(f"symbol {e.name!r} is not bound")
    if isinstance(e, Neg):
        return -eval_expr(e.arg, bindings)
    if isinstance(e, Call):
        args = [eval_expr(a, bindings) for a in e.args]
        return _FUNCS[e.fn](*args)
    if isinstance(e, Bin):
        a = eval_expr(e.left, bindings)
        b = eval_expr(e.right, bindings)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0.0:
                raise EvalDomainError("division by zero")
            return a / b
        try:
            r = a**b
        except (OverflowError, ZeroDivisionError, ValueError) as exc:
            raise EvalDomainError(f"cannot raise {a} to power {b}") from exc
        if isinstance(r, complex):
            raise EvalDomainError(f"{a}^{b} is not real")
        return r
    raise TypeError(f"not an Expr: {e!r}")


def compile_expr(e: Expr, names) -> "callable":
    """Compile `e` into ``f(*values)`` with `names` giving the argument order.

    The compiled form trades loud domain errors for speed: division by zero
    raises ZeroDivisionError and out-of-domain math raises ValueError, both
    from the underlying math library.
    """
    names = list(names)
    index = {n: i for i, n in enumerate(names)}

    def emit(node) -> str:
        if isinstance(node, Num):
            return repr(node.value)
        if isinstance(node, Sym):
            if node.name in index:
                return f"_a[{index[node.name]}]"
            if node.name == "pi":
                return "_pi"
            raise UnboundSymbolError(f"symbol {node.name!r} is not an argument")
        if isinstance(node, Neg):
            return f"(-{emit(node.arg)})"
        if isinstance(node, Call):
            args = ", ".join(emit(a) for a in node.args)
            return f"_f_{node.fn}({args})"
        if isinstance(node, Bin):
            op = "**" if node.op == "^" else node.op
            return f"({emit(node.left)}{op}{emit(node.right)})"
        raise TypeError(f"not an Expr: {node!r}")

    body = emit(e)
    env = {"_pi": math.pi}
    for fn, impl in _FUNCS.items():
        env[f"_f_{fn}"] = impl
    code = compile(f"lambda *_a: ({body})", "<pfida-expr>", "eval")
    return eval(code, env)
