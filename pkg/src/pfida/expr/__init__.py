"""Self-contained symbolic expression engine.

Immutable trees, a strict grammar, exact differentiation, best-effort
simplification backed by a seeded numeric equivalence oracle, and a small
antiderivative catalog.
"""

from .calculus import differentiate, gradient, integrate_catalog, substitute
from .evaluate import Bindings, compile_expr, eval_expr
from .nodes import (
    Bin,
    Call,
    Expr,
    Neg,
    Num,
    Sym,
    as_expr,
    call,
    free_symbols,
    num,
    sym,
    to_str,
)
from .numeric import (
    Domain,
    central_difference,
    default_domain_for,
    equiv_numeric,
    is_zero,
    max_residual,
    sample_points,
)
from .parser import parse
from .simplify import simplify

__all__ = [
    "Bin",
    "Bindings",
    "Call",
    "Domain",
    "Expr",
    "Neg",
    "Num",
    "Sym",
    "as_expr",
    "call",
    "central_difference",
    "compile_expr",
    "default_domain_for",
    "differentiate",
    "equiv_numeric",
    "eval_expr",
    "free_symbols",
    "gradient",
    "integrate_catalog",
    "is_zero",
    "max_residual",
    "num",
    "parse",
    "sample_points",
    "simplify",
    "substitute",
    "sym",
    "to_str",
]
