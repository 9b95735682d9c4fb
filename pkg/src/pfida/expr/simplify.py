"""Rule-based simplification via a canonical sum-of-products normal form.

The normal form flattens sums and products, folds constants, collects like
terms, merges equal bases' numeric exponents, and applies the
sin^2 + cos^2 -> 1 rule on equal-coefficient term pairs.  Products are not
expanded over sums, which keeps the rewrite idempotent and cheap.  No
completeness is promised; the numeric equivalence oracle is the authority
on zero-ness.
"""

from __future__ import annotations

from functools import lru_cache

from ..errors import EvalDomainError, UnboundSymbolError
from .evaluate import eval_expr
from .nodes import Bin, Call, Expr, Neg, Num, Sym, to_str


@lru_cache(maxsize=65536)
def simplify(e: Expr) -> Expr:
    """Best-effort value-preserving rewrite; idempotent by construction."""
    terms = _combine(_expand_singleton_sums(_normalize_zero_factors(_as_terms(e))))
    terms = _apply_pythagoras(terms)
    return _rebuild_terms(terms)


def _normalize_zero_factors(terms):
    """Canonicalize literal zero bases: 0^k kills a term for k > 0 and
    collapses to a single division by zero for k < 0."""
    out = []
    for coeff, factors in terms:
        zero_exp = 0.0
        kept = {}
        for key, (base, exp) in factors.items():
            if isinstance(base, Num) and base.value == 0.0:
                zero_exp += exp
            else:
                kept[key] = (base, exp)
        if zero_exp > 0.0:
            continue
        if zero_exp < 0.0:
            kept[to_str(Num(0.0))] = (Num(0.0), -1.0)
        out.append((coeff, kept))
    return out


def _expand_singleton_sums(terms):
    """Flatten terms whose sole factor is a sum to the first power.

    Such a factor would print inline and re-flatten on the next pass, so
    expanding it here keeps the normal form a fixed point.
    """
    out = []
    queue = list(terms)
    while queue:
        coeff, factors = queue.pop()
        if len(factors) == 1:
            (base, exp) = next(iter(factors.values()))
            if exp == 1.0 and _is_sum(base):
                queue.extend((coeff * c, f) for c, f in _as_terms(base))
                continue
        out.append((coeff, factors))
    return out


def _as_terms(e: Expr):
    """Flatten into [(coeff, factors)] with factors: key -> (base, exp)."""
    if isinstance(e, Bin) and e.op == "+":
        return _as_terms(e.left) + _as_terms(e.right)
    if isinstance(e, Bin) and e.op == "-":
        return _as_terms(e.left) + [(-c, f) for c, f in _as_terms(e.right)]
    if isinstance(e, Neg):
        return [(-c, f) for c, f in _as_terms(e.arg)]
    if isinstance(e, Num):
        return [(e.value, {})]
    if isinstance(e, Bin) and e.op in "*/":
        # a purely numeric side distributes over the other side's terms
        for side, other in ((e.left, e.right), (e.right, e.left)):
            c = _numeric_value(side)
            if c is None:
                continue
            if e.op == "/" and side is e.right and c != 0.0:
                return [(t / c, f) for t, f in _as_terms(other)]
            if e.op == "*":
                return [(t * c, f) for t, f in _as_terms(other)]
    return [_as_factors(e)]


def _numeric_value(e: Expr):
    s = simplify(e)
    if isinstance(s, Num):
        return s.value
    if isinstance(s, Neg) and isinstance(s.arg, Num):
        return -s.arg.value
    return None


def _as_factors(e: Expr):
    """Decompose a product-like node into (coeff, factor map)."""
    if isinstance(e, Num):
        return e.value, {}
    if isinstance(e, Neg):
        c, f = _as_factors(e.arg)
        return -c, f
    if isinstance(e, Bin) and e.op == "*":
        c1, f1 = _as_factors(e.left)
        c2, f2 = _as_factors(e.right)
        return _merge(c1 * c2, f1, f2)
    if isinstance(e, Bin) and e.op == "/":
        c1, f1 = _as_factors(e.left)
        c2, f2 = _as_factors(e.right)
        inv = {}
        coeff = c1
        if c2 == 0.0:
            _mul_factor(inv, Num(0.0), -1.0)
        else:
            coeff = c1 / c2
        for base, exp in f2.values():
            _mul_factor(inv, base, -exp)
        return _merge(coeff, f1, inv)
    if isinstance(e, Bin) and e.op == "^":
        return _power_factors(e.left, e.right)
    if isinstance(e, Sym):
        return 1.0, {e.name: (e, 1.0)}
    if isinstance(e, Call):
        folded = _fold_call(e)
        if isinstance(folded, Num):
            return folded.value, {}
        return 1.0, {to_str(folded): (folded, 1.0)}
    # remaining shape: an embedded sum; normalize it, then re-inspect
    s = simplify(e)
    if isinstance(s, Num):
        return s.value, {}
    if _is_sum(s):
        return 1.0, {to_str(s): (s, 1.0)}
    return _as_factors(s)


def _power_factors(base: Expr, expo: Expr):
    expo_s = simplify(expo)
    if isinstance(expo_s, Neg) and isinstance(expo_s.arg, Num):
        expo_s = Num(-expo_s.arg.value)
    if isinstance(expo_s, Num):
        n = expo_s.value
        if n == int(n):
            c, f = _as_factors(base) if not _is_sum_raw(base) else _sum_base(base)
            out = {}
            for b, ex in f.values():
                _mul_factor(out, b, ex * n)
            try:
                coeff = c**n
            except (ZeroDivisionError, OverflowError):
                coeff = 1.0
                _mul_factor(out, Num(c), n)
            return coeff, out
        base_s = simplify(base)
        if isinstance(base_s, Num) and base_s.value >= 0.0:
            return base_s.value**n, {}
        f = {}
        _mul_factor(f, base_s, n)
        return 1.0, f
    node = Bin("^", simplify(base), expo_s)
    return 1.0, {to_str(node): (node, 1.0)}


def _sum_base(base: Expr):
    s = simplify(base)
    if isinstance(s, Num):
        return s.value, {}
    if _is_sum(s):
        return 1.0, {to_str(s): (s, 1.0)}
    return _as_factors(s)


def _is_sum_raw(e: Expr) -> bool:
    return (isinstance(e, Bin) and e.op in "+-") or isinstance(e, Neg)


def _is_sum(e: Expr) -> bool:
    return isinstance(e, Bin) and e.op in "+-"


def _fold_call(e: Call) -> Expr:
    args = tuple(simplify(a) for a in e.args)
    if all(isinstance(a, Num) for a in args):
        try:
            return Num(eval_expr(Call(e.fn, args), {}))
        except (EvalDomainError, UnboundSymbolError, OverflowError):
            pass
    return Call(e.fn, args)


def _mul_factor(factors: dict, base: Expr, exp: float):
    if exp == 0.0:
        return
    if isinstance(base, Num):
        # folded by callers when safe; kept literal otherwise (e.g. 1/0)
        if base.value == 1.0:
            return
    key = to_str(base)
    if key in factors:
        b, old = factors[key]
        new = old + exp
        if new == 0.0:
            del factors[key]
        else:
            factors[key] = (b, new)
    else:
        factors[key] = (base, exp)


def _merge(coeff, f1, f2):
    out = dict(f1)
    for base, exp in f2.values():
        _mul_factor(out, base, exp)
    return coeff, out


def _term_key(factors: dict):
    return tuple(sorted((k, exp) for k, (b, exp) in factors.items()))


def _combine(terms):
    acc = {}
    for coeff, factors in terms:
        key = _term_key(factors)
        if key in acc:
            acc[key] = (acc[key][0] + coeff, acc[key][1])
        else:
            acc[key] = (coeff, factors)
    return [(c, f) for c, f in acc.values() if c != 0.0]


def _apply_pythagoras(terms):
    """Replace c*sin(u)^2*rest + c*cos(u)^2*rest by c*rest."""
    changed = True
    while changed:
        changed = False
        index = {_term_key(f): (c, f) for c, f in terms}
        for key, (coeff, factors) in list(index.items()):
            if key not in index:
                continue
            hit = None
            for fkey, (base, exp) in factors.items():
                if exp == 2.0 and isinstance(base, Call) and base.fn == "sin":
                    partner_f = dict(factors)
                    del partner_f[fkey]
                    _mul_factor(partner_f, Call("cos", base.args), 2.0)
                    pkey = _term_key(partner_f)
                    if pkey in index and index[pkey][0] == coeff and pkey != key:
                        hit = (fkey, pkey)
                        break
            if hit is None:
                continue
            fkey, pkey = hit
            rest = dict(factors)
            del rest[fkey]
            del index[key]
            del index[pkey]
            merged = _combine(list(index.values()) + [(coeff, rest)])
            index = {_term_key(f): (c, f) for c, f in merged}
            changed = True
        terms = list(index.values())
    return terms


def _rebuild_factors(factors: dict) -> Expr:
    num_parts, den_parts = [], []
    for key in sorted(factors):
        base, exp = factors[key]
        if exp > 0:
            num_parts.append(_pow(base, exp))
        else:
            den_parts.append(_pow(base, -exp))
    num = _product(num_parts)
    if den_parts:
        return Bin("/", num, _product(den_parts))
    return num


def _pow(base: Expr, exp: float) -> Expr:
    if exp == 1.0:
        return base
    return Bin("^", base, Num(exp))


def _product(parts) -> Expr:
    if not parts:
        return Num(1)
    out = parts[0]
    for p in parts[1:]:
        out = Bin("*", out, p)
    return out


def _rebuild_term(coeff: float, factors: dict):
    """Return (negative, magnitude-expression)."""
    negative = coeff < 0.0
    mag = abs(coeff)
    num_parts, den_parts = [], []
    for key in sorted(factors):
        base, exp = factors[key]
        if exp > 0:
            num_parts.append(_pow(base, exp))
        else:
            den_parts.append(_pow(base, -exp))
    if mag != 1.0 or not num_parts:
        num_parts.insert(0, Num(mag))
    num = _product(num_parts)
    if den_parts:
        return negative, Bin("/", num, _product(den_parts))
    return negative, num


def _rebuild_terms(terms) -> Expr:
    if not terms:
        return Num(0)
    ordered = sorted(terms, key=lambda cf: _term_key(cf[1]))
    out = None
    for coeff, factors in ordered:
        negative, body = _rebuild_term(coeff, factors)
        if out is None:
            out = Neg(body) if negative else body
        else:
            out = Bin("-" if negative else "+", out, body)
    return out
