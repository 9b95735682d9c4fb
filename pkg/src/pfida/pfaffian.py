"""Pfaffian forms, first-order PDEs, and the staged reduction solver.

A form Σ f_i dx_i = 0 in three variables that satisfies the integrability
condition X·curl(X) = 0 admits an integrating factor and can be solved by
freezing the third variable, solving the resulting two-variable form, and
re-attaching the third variable.  Every automated stage re-proves its own
output numerically; user-supplied hints are verified, never trusted.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    EvalDomainError,
    HypothesisViolatedError,
    NotExactError,
    NotInCatalogError,
    NotIntegrableError,
    ParameterizationFailedError,
    SamplingError,
    StageUnsolvableError,
)
from .expr import (
    Bin,
    Call,
    Domain,
    Expr,
    Neg,
    Num,
    Sym,
    as_expr,
    differentiate,
    eval_expr,
    free_symbols,
    integrate_catalog,
    is_zero,
    max_residual,
    parse,
    sample_points,
    simplify,
    substitute,
    to_str,
)
from .reporting import ResidualReport, combine_reports

DEFAULT_TOL = 1e-9
DEFAULT_POINTS = 200
DEFAULT_SEED = 42


@dataclass(frozen=True)
class PfaffianForm:
    """Σ coeffs[i] d vars[i] = 0."""

    vars: tuple
    coeffs: tuple
    domain: Domain = None

    def __post_init__(self):
        object.__setattr__(self, "vars", tuple(self.vars))
        object.__setattr__(self, "coeffs", tuple(as_expr(c) for c in self.coeffs))
        if len(self.coeffs) != len(self.vars) or len(self.vars) < 2:
            raise DimensionError(
                f"need matching vars/coeffs with n >= 2, got {len(self.vars)}/{len(self.coeffs)}"
            )

    @property
    def n(self):
        return len(self.vars)


@dataclass(frozen=True)
class FirstOrderPDE:
    """Σ P[i] ∂z/∂x_i = R; P and R may reference the unknown z."""

    indep_vars: tuple
    unknown: str
    P: tuple
    R: Expr
    domain: Domain = None

    def __post_init__(self):
        object.__setattr__(self, "indep_vars", tuple(self.indep_vars))
        object.__setattr__(self, "P", tuple(as_expr(p) for p in self.P))
        object.__setattr__(self, "R", as_expr(self.R))
        if len(self.P) != len(self.indep_vars) or not self.indep_vars:
            raise DimensionError("need one coefficient per independent variable")
        if all(isinstance(simplify(p), Num) and simplify(p).value == 0.0 for p in self.P):
            raise DimensionError("at least one coefficient must not vanish identically")


@dataclass(frozen=True)
class CharacteristicSystem:
    """The chain dx_1/P_1 = ... = dx_n/P_n = dz/R of a first-order PDE.

    A literal zero coefficient encodes "this variable is constant along
    characteristics"; no division ever happens on that leg.
    """

    pde: FirstOrderPDE

    @property
    def directions(self):
        return self.pde.P + (self.pde.R,)


@dataclass
class SolutionTrace:
    """Output of the staged solver, with the evidence that re-proves it."""

    U: Expr
    mu: Expr
    K: Expr
    phi_arg: Expr
    residual_report: ResidualReport
    K_in_U_x3: Expr = None


def _d(e, v):
    return simplify(differentiate(e, v))


def integrability_residual(f: PfaffianForm) -> Expr:
    """X·curl(X) for a three-variable form."""
    terms = _integrability_terms(f)
    out = terms[0]
    for t in terms[1:]:
        out = Bin("+", out, t)
    return simplify(out)


def _integrability_terms(f: PfaffianForm):
    if f.n != 3:
        raise DimensionError(f"integrability condition needs n = 3, got n = {f.n}")
    P, Q, R = f.coeffs
    x1, x2, x3 = f.vars
    return [
        simplify(Bin("*", P, _d(R, x2))),
        simplify(Neg(Bin("*", P, _d(Q, x3)))),
        simplify(Bin("*", Q, _d(P, x3))),
        simplify(Neg(Bin("*", Q, _d(R, x1)))),
        simplify(Bin("*", R, _d(Q, x1))),
        simplify(Neg(Bin("*", R, _d(P, x2)))),
    ]


def is_integrable(
    f: PfaffianForm,
    domain: Domain = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n: int = DEFAULT_POINTS,
):
    """Hybrid zero test of the integrability residual; returns (bool, report)."""
    domain = domain or f.domain
    terms = _integrability_terms(f)
    residual = integrability_residual(f)
    if isinstance(residual, Num) and residual.value == 0.0:
        report = ResidualReport("integrability", 0, 0.0, tol, seed, note="simplified to 0")
        return True, report
    worst, raw = max_residual(terms, domain, n=n, seed=seed)
    report = ResidualReport("integrability", n, worst, tol, seed, max_raw_residual=raw)
    return report.passed, report


def exactness_defect(f: PfaffianForm):
    """∂f_j/∂x_i - ∂f_i/∂x_j for the pairs (1,2), (1,3), (2,3)."""
    if f.n != 3:
        raise DimensionError(f"exactness defect needs n = 3, got n = {f.n}")
    out = []
    for i, j in ((0, 1), (0, 2), (1, 2)):
        out.append(
            simplify(Bin("-", differentiate(f.coeffs[j], f.vars[i]), differentiate(f.coeffs[i], f.vars[j])))
        )
    return out


def reconstruct_potential(
    f: PfaffianForm,
    base,
    target,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n_quad: int = 64,
    params: dict = None,
) -> float:
    """Line integral of the exact form along the axis-aligned polyline base -> target.

    Equals Φ(target) - Φ(base) for any potential Φ of the form.
    """
    params = dict(params or (f.domain.params if f.domain else {}))
    box = {}
    for i, v in enumerate(f.vars):
        lo, hi = min(base[i], target[i]), max(base[i], target[i])
        if hi - lo < 1e-9:
            lo, hi = lo - 1e-6, hi + 1e-6
        box[v] = (lo, hi)
    check_domain = Domain(box, exclusions=f.domain.exclusions if f.domain else (), params=params)
    for defect in exactness_defect(f):
        if not is_zero(defect, check_domain, tol=max(tol, 1e-8), seed=seed):
            raise NotExactError(f"form is not exact on the integration box: defect {to_str(defect)}")

    nodes, weights = np.polynomial.legendre.leggauss(n_quad)
    total = 0.0
    current = list(base)
    for i, v in enumerate(f.vars):
        a, b = current[i], target[i]
        if a == b:
            continue
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        for t, w in zip(nodes, weights):
            bindings = dict(zip(f.vars, current))
            bindings[v] = mid + half * t
            bindings.update(params)
            try:
                total += w * half * eval_expr(f.coeffs[i], bindings)
            except EvalDomainError as exc:
                raise EvalDomainError(f"integration path crosses a singularity: {exc}") from exc
        current[i] = b
    return total


def check_pde_solution(
    pde: FirstOrderPDE,
    candidate: Expr,
    domain: Domain = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n: int = DEFAULT_POINTS,
    name: str = "pde-solution",
) -> ResidualReport:
    """Residual Σ P_i ∂z/∂x_i - R with the candidate substituted for z."""
    domain = domain or pde.domain
    candidate = as_expr(candidate)
    sub = {pde.unknown: candidate}
    terms = []
    for v, p in zip(pde.indep_vars, pde.P):
        p_sub = substitute(p, sub)
        terms.append(simplify(Bin("*", p_sub, differentiate(candidate, v))))
    terms.append(simplify(Neg(substitute(pde.R, sub))))
    worst, raw = max_residual(terms, domain, n=n, seed=seed)
    return ResidualReport(name, n, worst, tol, seed, max_raw_residual=raw)


def characteristic_residuals(
    cs: CharacteristicSystem,
    phis,
    domain: Domain = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n: int = DEFAULT_POINTS,
):
    """One report per candidate first integral φ(x, z) = c of the chain."""
    pde = cs.pde
    domain = domain or pde.domain
    out = []
    for idx, phi in enumerate(phis):
        phi = as_expr(phi)
        terms = [
            simplify(Bin("*", p, differentiate(phi, v)))
            for v, p in zip(pde.indep_vars, pde.P)
        ]
        if pde.unknown in free_symbols(phi):
            terms.append(simplify(Bin("*", pde.R, differentiate(phi, pde.unknown))))
        worst, raw = max_residual(terms, domain, n=n, seed=seed)
        out.append(
            ResidualReport(f"first-integral[{idx}] {to_str(phi)}", n, worst, tol, seed, max_raw_residual=raw)
        )
    return out


def lemma1_check(
    pde: FirstOrderPDE,
    hom_candidates,
    nonhom,
    domain: Domain = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n: int = DEFAULT_POINTS,
    name: str = "split-solution",
) -> ResidualReport:
    """Verify a homogeneous/non-homogeneous solution split.

    Requires z-free coefficients.  Checks (a) each homogeneous candidate is
    constant along the z-free chain, (b) the non-homogeneous part satisfies
    the full PDE, and (c) so does their sum.
    """
    domain = domain or pde.domain
    for p in pde.P + (pde.R,):
        if pde.unknown in free_symbols(p):
            raise HypothesisViolatedError(
                f"coefficient {to_str(p)} references the unknown {pde.unknown!r}"
            )
    parts = []
    cs = CharacteristicSystem(pde)
    hom_reports = characteristic_residuals(
        cs, [as_expr(h) for h in hom_candidates], domain=domain, tol=tol, seed=seed, n=n
    )
    parts.extend(hom_reports)
    nonhom = as_expr(nonhom)
    parts.append(
        check_pde_solution(pde, nonhom, domain, tol, seed, n, name="non-homogeneous part")
    )
    total = nonhom
    for h in hom_candidates:
        total = Bin("+", total, as_expr(h))
    parts.append(check_pde_solution(pde, total, domain, tol, seed, n, name="superposition"))
    return combine_reports(name, parts)


# ---------------------------------------------------------------------------
# staged solver
# ---------------------------------------------------------------------------


@dataclass
class SolveOptions:
    hint_u: Expr = None
    tol: float = DEFAULT_TOL
    n: int = DEFAULT_POINTS
    seed: int = DEFAULT_SEED
    domain: Domain = None


def _solve_two_form(P, Q, v1, v2, domain, tol, seed, stage):
    """Solve P dv1 + Q dv2 = 0 for U(v1, v2) via a recognizer cascade.

    Cascade: exact as written, integrating factor e^(∫h dv1) or e^(∫h dv2),
    then pure power factors v^k.  Other variables ride along as parameters.
    """
    P, Q = simplify(P), simplify(Q)
    defect = simplify(Bin("-", differentiate(P, v2), differentiate(Q, v1)))
    if is_zero(defect, domain, tol=tol, seed=seed):
        return _solve_exact_two(P, Q, v1, v2, domain, tol, seed, stage)

    # integrating factor depending on one variable only
    for hvar, other, num_, den in ((v1, v2, defect, Q), (v2, v1, simplify(Neg(defect)), P)):
        try:
            h = simplify(Bin("/", num_, den))
        except ZeroDivisionError:  # pragma: no cover
            continue
        if is_zero(simplify(differentiate(h, other)), domain, tol=1e-8, seed=seed):
            # h = c/x gives the cleaner multiplier x^c instead of exp(c ln|x|)
            hx = simplify(Bin("*", h, Sym(hvar)))
            if isinstance(hx, Neg) and isinstance(hx.arg, Num):
                hx = Num(-hx.arg.value)
            if isinstance(hx, Num):
                mu = Bin("^", Sym(hvar), hx)
            else:
                try:
                    mu = Call("exp", (integrate_catalog(h, hvar),))
                except NotInCatalogError:
                    continue
            mP = simplify(Bin("*", mu, P))
            mQ = simplify(Bin("*", mu, Q))
            d2 = simplify(Bin("-", differentiate(mP, v2), differentiate(mQ, v1)))
            if is_zero(d2, domain, tol=1e-8, seed=seed):
                return _solve_exact_two(mP, mQ, v1, v2, domain, tol, seed, stage)

    for base_var in (v1, v2):
        for k in (-3, -2, -1, 1, 2, 3):
            mu = Bin("^", Sym(base_var), Num(k))
            mP = simplify(Bin("*", mu, P))
            mQ = simplify(Bin("*", mu, Q))
            d2 = simplify(Bin("-", differentiate(mP, v2), differentiate(mQ, v1)))
            if is_zero(d2, domain, tol=1e-8, seed=seed):
                try:
                    return _solve_exact_two(mP, mQ, v1, v2, domain, tol, seed, stage)
                except StageUnsolvableError:
                    continue
    raise StageUnsolvableError(stage, "recognizer cascade exhausted; supply a hint for U")


def _solve_exact_two(P, Q, v1, v2, domain, tol, seed, stage):
    try:
        U1 = integrate_catalog(P, v1)
    except NotInCatalogError as exc:
        raise StageUnsolvableError(stage, f"cannot integrate {to_str(P)} d{v1}: {exc}") from exc
    g = simplify(Bin("-", Q, differentiate(U1, v2)))
    if not is_zero(simplify(differentiate(g, v1)), domain, tol=1e-8, seed=seed):
        raise StageUnsolvableError(stage, "exact reconstruction left a mixed remainder")
    try:
        U2 = integrate_catalog(g, v2)
    except NotInCatalogError as exc:
        raise StageUnsolvableError(stage, f"cannot integrate {to_str(g)} d{v2}: {exc}") from exc
    return simplify(Bin("+", U1, U2))


def _level_set_pairs(f, U, K, domain, seed, n_pairs=20):
    """Sample pairs with equal U and equal x3; return worst |ΔK| scaled."""
    x1, x2, x3 = f.vars
    rng = np.random.default_rng(seed + 1)
    pts = sample_points(domain, 4 * n_pairs, seed + 2)
    worst = 0.0
    found = 0
    lo1, hi1 = domain.box[x1]
    for p in pts:
        if found >= n_pairs:
            break
        target_u = eval_expr(U, p)
        k1 = eval_expr(K, p)
        # move x2 randomly, then solve for x1 on the same U level set by bisection
        q = dict(p)
        lo2, hi2 = domain.box[x2]
        q[x2] = lo2 + rng.random() * (hi2 - lo2)

        def g(x1v):
            q2 = dict(q)
            q2[x1] = x1v
            return eval_expr(U, q2) - target_u

        try:
            ga, gb = g(lo1), g(hi1)
        except EvalDomainError:
            continue
        if ga == 0.0:
            root = lo1
        elif gb == 0.0:
            root = hi1
        elif ga * gb > 0:
            continue
        else:
            a, b = lo1, hi1
            for _ in range(80):
                midv = 0.5 * (a + b)
                gm = g(midv)
                if ga * gm <= 0:
                    b = midv
                else:
                    a, ga = midv, gm
            root = 0.5 * (a + b)
        q[x1] = root
        if abs(g(root)) > 1e-7 * max(1.0, abs(target_u)):
            continue
        try:
            k2 = eval_expr(K, q)
        except EvalDomainError:
            continue
        worst = max(worst, abs(k2 - k1) / max(1.0, abs(k1)))
        found += 1
    return worst, found


def five_stage_solve(f: PfaffianForm, options: SolveOptions = None) -> SolutionTrace:
    """Reduce an integrable three-variable form to φ(U, x3) = C.

    Freezes x3 and solves the two-variable restriction for U, forms the
    multiplier μ and the remainder K = μR - ∂U/∂x3, re-expresses K in
    (U, x3), solves dU + K dx3 = 0, and numerically proves that the
    gradient of the result is parallel to the form's coefficient vector.
    """
    options = options or SolveOptions()
    domain = options.domain or f.domain
    tol, seed, n = options.tol, options.seed, options.n
    if f.n != 3:
        raise DimensionError(f"staged solver handles n = 3 forms, got n = {f.n}")
    ok, integ_report = is_integrable(f, domain, tol=tol, seed=seed, n=n)
    if not ok:
        raise NotIntegrableError(
            f"integrability residual {to_str(integrability_residual(f))} is not zero"
        )
    P, Q, R = f.coeffs
    x1, x2, x3 = f.vars

    if options.hint_u is not None:
        U = simplify(as_expr(options.hint_u))
        tangency = [
            simplify(Bin("*", differentiate(U, x1), Q)),
            simplify(Neg(Bin("*", differentiate(U, x2), P))),
        ]
        worst, _ = max_residual(tangency, domain, n=n, seed=seed)
        if worst > tol or is_zero(differentiate(U, x1), domain, tol=tol, seed=seed):
            raise StageUnsolvableError(1, "hint U failed verification against the frozen form")
    else:
        U = _solve_two_form(P, Q, x1, x2, domain, tol, seed, stage=1)

    mu = simplify(Bin("/", differentiate(U, x1), P))
    mu_cross = [
        simplify(Bin("*", mu, Q)),
        simplify(Neg(differentiate(U, x2))),
    ]
    mu_worst, mu_raw = max_residual(mu_cross, domain, n=n, seed=seed)
    mu_report = ResidualReport("multiplier consistency", n, mu_worst, tol, seed, max_raw_residual=mu_raw)
    if not mu_report.passed:
        raise StageUnsolvableError(1, "multiplier is inconsistent between the two legs")

    K = simplify(Bin("-", Bin("*", mu, R), differentiate(U, x3)))

    K_expr, K_sub = _parameterize_k(f, U, K, domain, tol, seed)
    pair_worst, pairs_found = _level_set_pairs(f, U, K, domain, seed)
    if pairs_found >= 3 and pair_worst > 1e-8:
        raise ParameterizationFailedError(
            f"K varies by {pair_worst:.2e} on U level sets; K is not K(U, x3)"
        )

    U4 = _solve_two_form(Num(1), K_expr, "U_", x3, _stage4_domain(f, U, domain, seed), tol, seed, stage=4)
    phi_arg = simplify(substitute(U4, {"U_": U}))

    grad = [simplify(differentiate(phi_arg, v)) for v in f.vars]
    cross_terms = [
        [simplify(Bin("*", grad[1], R)), simplify(Neg(Bin("*", grad[2], Q)))],
        [simplify(Bin("*", grad[2], P)), simplify(Neg(Bin("*", grad[0], R)))],
        [simplify(Bin("*", grad[0], Q)), simplify(Neg(Bin("*", grad[1], P)))],
    ]
    worst = 0.0
    raw = 0.0
    for terms in cross_terms:
        w, r = max_residual(terms, domain, n=n, seed=seed)
        worst, raw = max(worst, w), max(raw, r)
    grad_report = ResidualReport(
        "gradient parallel to form", n, worst, max(tol, 1e-8), seed, max_raw_residual=raw
    )
    report = combine_reports(
        "staged-solve", [integ_report, mu_report, grad_report], note=f"U level-set spread {pair_worst:.2e}"
    )
    if not grad_report.passed:
        raise StageUnsolvableError(5, f"gradient of {to_str(phi_arg)} is not parallel to the form")
    return SolutionTrace(U=U, mu=mu, K=K, phi_arg=phi_arg, residual_report=report, K_in_U_x3=K_sub)


def _parameterize_k(f, U, K, domain, tol, seed):
    """Rewrite K as an expression in (U, x3); returns (expr-with-U_, same)."""
    x1, x2, x3 = f.vars
    k1 = simplify(differentiate(K, x1))
    k2 = simplify(differentiate(K, x2))
    if is_zero(k1, domain, tol=tol, seed=seed) and is_zero(k2, domain, tol=tol, seed=seed):
        return K, K
    u1 = simplify(differentiate(U, x1))
    a = simplify(Bin("/", k1, u1))
    for v in (x1, x2):
        if not is_zero(simplify(differentiate(a, v)), domain, tol=1e-8, seed=seed):
            raise ParameterizationFailedError("K is not affine in U with x3-only coefficients")
    b = simplify(Bin("-", K, Bin("*", a, U)))
    for v in (x1, x2):
        if not is_zero(simplify(differentiate(b, v)), domain, tol=1e-8, seed=seed):
            raise ParameterizationFailedError("K - a*U still depends on the frozen variables")
    expr = simplify(Bin("+", Bin("*", a, Sym("U_")), b))
    return expr, expr


def _stage4_domain(f, U, domain, seed):
    """Box for (U, x3) built from the observed range of U over the sample box."""
    pts = sample_points(domain, 100, seed + 3)
    vals = [eval_expr(U, p) for p in pts]
    lo, hi = min(vals), max(vals)
    if hi - lo < 1e-6:
        lo, hi = lo - 1.0, hi + 1.0
    box = {"U_": (lo, hi), f.vars[2]: domain.box[f.vars[2]]}
    return Domain(box, exclusions=(), params=dict(domain.params))


# ---------------------------------------------------------------------------
# .pf form files
# ---------------------------------------------------------------------------


def load_form(path) -> PfaffianForm:
    """Read a line-oriented `.pf` form file.

    Lines: ``vars = x,y,theta``; ``P = <expr>``, ``Q = <expr>``,
    ``R = <expr>``; optional ``exclude = <expr> != 0``;
    ``domain <var> = <lo>,<hi>``; ``param <name> = <value>``.
    """
    from .errors import CaseFormatError

    variables = None
    coeffs = {}
    box = {}
    exclusions = []
    params = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise CaseFormatError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            if key == "vars":
                variables = tuple(v.strip() for v in value.split(","))
            elif key in ("P", "Q", "R"):
                coeffs[key] = parse(value)
            elif key == "exclude":
                if not value.endswith("!= 0"):
                    raise CaseFormatError(f"{path}:{lineno}: exclude lines end with '!= 0'")
                exclusions.append(parse(value[: -len("!= 0")].rstrip().rstrip("!").strip()))
            elif key.startswith("domain "):
                var = key.split(None, 1)[1]
                lo, hi = (float(s) for s in value.split(","))
                box[var] = (lo, hi)
            elif key.startswith("param "):
                params[key.split(None, 1)[1]] = float(value)
            else:
                raise CaseFormatError(f"{path}:{lineno}: unknown key {key!r}")
    if variables is None or len(variables) != 3:
        raise CaseFormatError(f"{path}: needs 'vars = <3 names>'")
    missing = [k for k in ("P", "Q", "R") if k not in coeffs]
    if missing:
        raise CaseFormatError(f"{path}: missing coefficient lines {missing}")
    for v in variables:
        box.setdefault(v, (0.5, 1.5))
    domain = Domain(box, tuple(exclusions), params)
    return PfaffianForm(variables, (coeffs["P"], coeffs["Q"], coeffs["R"]), domain)
