"""Seeded numeric oracles: sampling domains, equivalence, and zero tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..errors import EvalDomainError, PfidaError, SamplingError, UnboundSymbolError
from .calculus import differentiate
from .evaluate import eval_expr
from .nodes import Expr, Num, free_symbols
from .simplify import simplify

DEFAULT_POINTS = 200
DEFAULT_TOL = 1e-9
DEFAULT_SEED = 42


@dataclass(frozen=True)
class Domain:
    """Sampling box with declared singular-set exclusions.

    `box` maps variable names to (lo, hi).  Each exclusion expression must
    stay at least `margin_scale` * (largest box width) away from zero at
    accepted sample points.  `params` are fixed bindings merged into every
    sample.
    """

    box: dict
    exclusions: tuple = ()
    params: dict = field(default_factory=dict)
    margin_scale: float = 1e-3

    def with_params(self, **params) -> "Domain":
        merged = dict(self.params)
        merged.update(params)
        return Domain(self.box, self.exclusions, merged, self.margin_scale)

    def margin(self) -> float:
        if not self.box:
            return 0.0
        width = max(hi - lo for lo, hi in self.box.values())
        return self.margin_scale * width

    def contains(self, bindings: dict) -> bool:
        margin = self.margin()
        for name, (lo, hi) in self.box.items():
            v = bindings[name]
            if not (lo <= v <= hi):
                return False
        full = {**self.params, **bindings}
        for excl in self.exclusions:
            try:
                if abs(eval_expr(excl, full)) <= margin:
                    return False
            except EvalDomainError:
                return False
        return True


def sample_points(domain: Domain, n: int, seed: int):
    """Draw `n` uniform in-box points clear of all exclusions, deterministically."""
    rng = np.random.default_rng(seed)
    names = sorted(domain.box)
    los = np.array([domain.box[k][0] for k in names])
    his = np.array([domain.box[k][1] for k in names])
    margin = domain.margin()
    points = []
    attempts = 0
    limit = max(100 * n, 1000)
    while len(points) < n:
        if attempts >= limit:
            raise SamplingError(
                f"could not draw {n} points clear of exclusions in {limit} attempts"
            )
        attempts += 1
        vals = los + rng.random(len(names)) * (his - los)
        bindings = dict(zip(names, vals))
        bindings.update(domain.params)
        ok = True
        for excl in domain.exclusions:
            try:
                if abs(eval_expr(excl, bindings)) <= margin:
                    ok = False
                    break
            except EvalDomainError:
                ok = False
                break
        if ok:
            points.append(bindings)
    return points


def equiv_numeric(
    e1: Expr,
    e2: Expr,
    domain: Domain,
    n: int = DEFAULT_POINTS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> bool:
    """True iff |e1-e2| <= tol*max(1, |e1|, |e2|) at all n seeded samples."""
    worst, _ = max_residual([e1, _negated(e2)], domain, n, seed)
    return worst <= tol


def _negated(e: Expr) -> Expr:
    from .nodes import Neg

    return Neg(e)


def max_residual(terms, domain: Domain, n: int = DEFAULT_POINTS, seed: int = DEFAULT_SEED):
    """Largest scaled residual of sum(terms) over seeded samples.

    The scale at each point is max(1, |t_i|): cancellation is measured
    against the magnitude of the quantities that are supposed to cancel.
    Returns (max scaled residual, max raw residual).
    """
    points = sample_points(domain, n, seed)
    worst = 0.0
    worst_raw = 0.0
    for bindings in points:
        vals = [eval_expr(t, bindings) for t in terms]
        resid = math.fsum(vals)
        scale = max(1.0, max(abs(v) for v in vals)) if vals else 1.0
        worst = max(worst, abs(resid) / scale)
        worst_raw = max(worst_raw, abs(resid))
    return worst, worst_raw


def is_zero(
    e: Expr,
    domain: Domain,
    n: int = DEFAULT_POINTS,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> bool:
    """Hybrid zero test: simplify to a literal 0, else sampled comparison."""
    s = simplify(e)
    if isinstance(s, Num):
        return s.value == 0.0
    worst, _ = max_residual([s], domain, n, seed)
    return worst <= tol


def default_domain_for(exprs, lo: float = 0.4, hi: float = 1.3) -> Domain:
    """A generic positive box over every free symbol of `exprs`."""
    names = set()
    for e in exprs:
        names |= free_symbols(e)
    names.discard("pi")
    return Domain({name: (lo, hi) for name in sorted(names)})


def central_difference(e: Expr, var: str, bindings: dict, rel_h: float = 1e-6) -> float:
    """Symmetric finite-difference estimate of a partial derivative."""
    x = bindings[var]
    h = rel_h * max(1.0, abs(x))
    up = dict(bindings, **{var: x + h})
    dn = dict(bindings, **{var: x - h})
    return (eval_expr(e, up) - eval_expr(e, dn)) / (2.0 * h)


def verify_antiderivative(F: Expr, f: Expr, var: str, seed: int = DEFAULT_SEED):
    """Check d/dvar F == f numerically; raises on disagreement.

    Used as an internal guard by the integration catalog, so failures are
    implementation bugs, not user errors.
    """
    dF = differentiate(F, var)
    domain = default_domain_for([F, f])
    checked = 0
    for bindings in sample_points(domain, 40, seed):
        try:
            got = eval_expr(dF, bindings)
            want = eval_expr(f, bindings)
        except (EvalDomainError, UnboundSymbolError):
            continue
        if abs(got - want) > 1e-6 * max(1.0, abs(got), abs(want)):
            raise PfidaError(
                f"antiderivative check failed for d/d{var}: got {got}, expected {want}"
            )
        checked += 1
    if checked < 5:
        raise PfidaError("antiderivative check could not evaluate enough sample points")
