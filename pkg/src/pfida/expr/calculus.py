"""Symbolic differentiation, substitution, and catalog integration."""

from __future__ import annotations

from ..errors import NotInCatalogError
from .nodes import Bin, Call, Expr, Neg, Num, Sym, free_symbols


def substitute(e: Expr, replacements: dict) -> Expr:
    """Simultaneously replace symbols by expressions.

    `replacements` maps symbol names to Expr (or anything `as_expr` accepts).
    """
    from .nodes import as_expr

    repl = {name: as_expr(v) for name, v in replacements.items()}

    def walk(node):
        if isinstance(node, Sym):
            return repl.get(node.name, node)
        if isinstance(node, Num):
            return node
        if isinstance(node, Neg):
            return Neg(walk(node.arg))
        if isinstance(node, Call):
            return Call(node.fn, tuple(walk(a) for a in node.args))
        if isinstance(node, Bin):
            return Bin(node.op, walk(node.left), walk(node.right))
        raise TypeError(f"not an Expr: {node!r}")

    return walk(e)


def differentiate(e: Expr, var: str) -> Expr:
    """Exact symbolic partial derivative of `e` with respect to `var`.

    abs is differentiated as its sign (u/|u|), which correctly raises a
    domain error when later evaluated at u = 0.
    """
    zero, one = Num(0), Num(1)

    def d(node):
        if isinstance(node, Num):
            return zero
        if isinstance(node, Sym):
            return one if node.name == var else zero
        if isinstance(node, Neg):
            return Neg(d(node.arg))
        if isinstance(node, Bin):
            u, v = node.left, node.right
            du, dv = d(u), d(v)
            if node.op == "+":
                return Bin("+", du, dv)
            if node.op == "-":
                return Bin("-", du, dv)
            if node.op == "*":
                return Bin("+", Bin("*", du, v), Bin("*", u, dv))
            if node.op == "/":
                num_ = Bin("-", Bin("*", du, v), Bin("*", u, dv))
                return Bin("/", num_, Bin("^", v, Num(2)))
            # power
            if isinstance(v, Num):
                return Bin("*", Bin("*", v, Bin("^", u, Num(v.value - 1))), du)
            if var not in free_symbols(v):
                return Bin("*", Bin("*", v, Bin("^", u, Bin("-", v, one))), du)
            # general u^v
            term = Bin("+", Bin("*", dv, Call("ln", (u,))), Bin("/", Bin("*", v, du), u))
            return Bin("*", node, term)
        if isinstance(node, Call):
            (u,) = node.args
            du = d(u)
            if node.fn == "sin":
                outer = Call("cos", (u,))
            elif node.fn == "cos":
                outer = Neg(Call("sin", (u,)))
            elif node.fn == "tan":
                outer = Bin("/", one, Bin("^", Call("cos", (u,)), Num(2)))
            elif node.fn == "ln":
                outer = Bin("/", one, u)
            elif node.fn == "exp":
                outer = node
            elif node.fn == "sqrt":
                outer = Bin("/", one, Bin("*", Num(2), node))
            elif node.fn == "abs":
                outer = Bin("/", u, node)  # sign(u), undefined at 0
            else:  # pragma: no cover - parser rejects unknown functions
                raise TypeError(f"no derivative rule for {node.fn}")
            return Bin("*", outer, du)
        raise TypeError(f"not an Expr: {node!r}")

    return d(e)


def gradient(e: Expr, variables) -> list:
    """Componentwise partial derivatives, in the order given."""
    return [differentiate(e, v) for v in variables]


def _linear_in(u: Expr, var: str):
    """Return (a, b) with u = a*var + b and a, b free of var, else None."""
    from .simplify import simplify

    a = simplify(differentiate(u, var))
    if var in free_symbols(a):
        return None
    b = simplify(substitute(u, {var: Num(0)}))
    if var in free_symbols(b):
        return None
    return a, b


def integrate_catalog(e: Expr, var: str) -> Expr:
    """Antiderivative of `e` in `var` for a small catalog of shapes.

    Covered: anything free of `var`, powers of `var` (and of linear forms),
    1/var, sin/cos/exp of linear arguments, polynomial-times-sin/cos/exp via
    integration by parts, plus sums and constant multiples of all of these.
    Raises NotInCatalogError otherwise.  The result is verified against the
    input by a seeded numeric derivative check.
    """
    from .numeric import verify_antiderivative
    from .simplify import simplify

    result = simplify(_integrate_terms(simplify(e), var))
    verify_antiderivative(result, e, var)
    return result


def _integrate_terms(e: Expr, var: str) -> Expr:
    from .simplify import _as_terms

    terms = _as_terms(e)
    out = []
    for coeff, factors in terms:
        out.append((coeff, _integrate_monomial(factors, var)))
    total = None
    for coeff, part in out:
        piece = part if coeff == 1.0 else Bin("*", Num(coeff), part)
        total = piece if total is None else Bin("+", total, piece)
    return total if total is not None else Num(0)


def _integrate_monomial(factors: dict, var: str) -> Expr:
    """Integrate a product of canonical factors (exponents are floats)."""
    from .simplify import _rebuild_factors, simplify

    const_f = {}
    dep = []
    for key, (base, exp) in factors.items():
        if var in free_symbols(base):
            dep.append((base, exp))
        else:
            const_f[key] = (base, exp)
    const = _rebuild_factors(const_f)  # may be Num(1)

    body = _integrate_dependent(dep, var)
    if isinstance(const, Num) and const.value == 1.0:
        return body
    return Bin("*", const, body)


def _integrate_dependent(dep, var: str) -> Expr:
    x = Sym(var)
    if not dep:
        return x
    if len(dep) == 1:
        base, exp = dep[0]
        e = _integrate_power(base, exp, var)
        if e is not None:
            return e
    if len(dep) == 2:
        e = _integrate_by_parts(dep, var)
        if e is not None:
            return e
    e = _distribute_sum_factor(dep, var)
    if e is not None:
        return e
    raise NotInCatalogError(
        "antiderivative of " + "*".join(f"({b})^{g}" for b, g in dep) + f" d{var} not in catalog"
    )


def _integrate_power(base: Expr, exp: float, var: str):
    """∫ base^exp dvar for linear bases and sin/cos/exp(linear) with exp=1."""
    lin = _linear_in(base, var)
    if lin is not None:
        a, _ = lin
        if isinstance(a, Num) or var not in free_symbols(a):
            u = base
            if exp == -1.0:
                anti = Call("ln", (Call("abs", (u,)),))
            else:
                anti = Bin("/", Bin("^", u, Num(exp + 1)), Num(exp + 1))
            return _divide_by(anti, a)
    if isinstance(base, Call) and exp == 1.0 and len(base.args) == 1:
        lin = _linear_in(base.args[0], var)
        if lin is None:
            return None
        a, _ = lin
        u = base.args[0]
        if base.fn == "sin":
            return _divide_by(Neg(Call("cos", (u,))), a)
        if base.fn == "cos":
            return _divide_by(Call("sin", (u,)), a)
        if base.fn == "exp":
            return _divide_by(Call("exp", (u,)), a)
    if isinstance(base, Call) and exp > 1.0 and exp == int(exp):
        return None  # trig powers beyond the catalog
    return None


def _distribute_sum_factor(dep, var: str):
    """Expand one sum factor with a positive integer exponent and recurse.

    Turns e.g. (a*x + b)*exp(c*x) into a*x*exp(c*x) + b*exp(c*x), whose
    pieces the by-parts rule covers.  Exponents shrink by one per level,
    so the recursion terminates.
    """
    from .simplify import _as_terms, _rebuild_terms, simplify

    for i, (base, exp) in enumerate(dep):
        if not (isinstance(base, Bin) and base.op in "+-"):
            continue
        if exp != int(exp) or exp < 1.0:
            continue
        rest = list(dep)
        if exp > 1.0:
            rest[i] = (base, exp - 1.0)
        else:
            rest.pop(i)
        rest_prod = Num(1)
        for b, g in rest:
            rest_prod = Bin("*", rest_prod, b if g == 1.0 else Bin("^", b, Num(g)))
        total = None
        for coeff, factors in _as_terms(base):
            addend = _rebuild_terms([(coeff, factors)])
            piece = _integrate_terms(simplify(Bin("*", addend, rest_prod)), var)
            total = piece if total is None else Bin("+", total, piece)
        return total if total is not None else Num(0)
    return None


def _integrate_by_parts(dep, var: str):
    """∫ u^n * f(a*var+b) dvar with f in {sin, cos, exp}, by parts on n."""
    from .simplify import simplify

    poly = None
    trig = None
    for base, exp in dep:
        if isinstance(base, Sym) and base.name == var and exp == int(exp) and exp >= 1:
            poly = (base, int(exp))
        elif isinstance(base, Call) and exp == 1.0 and base.fn in ("sin", "cos", "exp"):
            trig = base
    if poly is None or trig is None:
        return None
    lin = _linear_in(trig.args[0], var)
    if lin is None:
        return None
    a, _ = lin
    n = poly[1]
    F = _integrate_power(trig, 1.0, var)
    if F is None:
        return None
    xn = Bin("^", Sym(var), Num(n)) if n != 1 else Sym(var)
    lead = Bin("*", xn, F)
    rest_integrand = simplify(Bin("*", Num(n), Bin("*", Bin("^", Sym(var), Num(n - 1)), F)))
    rest = _integrate_terms(rest_integrand, var)
    return Bin("-", lead, rest)


def _divide_by(e: Expr, a: Expr) -> Expr:
    if isinstance(a, Num) and a.value == 1.0:
        return e
    return Bin("/", e, a)
