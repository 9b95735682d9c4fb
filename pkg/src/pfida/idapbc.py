"""Port-controlled Hamiltonian models and interconnection-damping matching.

The plant ẋ = (J−R)∇H + g·u is matched to a target structure
ẋ = (J_d−R_d)∇H_d by choosing H_d (and, for mechanical systems, M_d, V_d
and a free skew matrix J₂) so that the projection of the two fields onto
the unactuated directions agrees.  Feasibility reduces to first-order
PDEs whose residuals this module constructs symbolically; the actual
solving lives in `pfaffian`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, EvalDomainError, NotAffineError, PfidaError, SingularInputError
from .expr import (
    Bin,
    Domain,
    Expr,
    Neg,
    Num,
    Sym,
    as_expr,
    central_difference,
    differentiate,
    eval_expr,
    free_symbols,
    gradient,
    is_zero,
    max_residual,
    sample_points,
    simplify,
    substitute,
)
from .linalg import (
    as_matrix,
    as_vector,
    identity,
    inverse,
    mat_mul,
    mat_scale,
    mat_sub,
    mat_vec,
    transpose,
    vec_dot,
    zeros,
)
from .pfaffian import FirstOrderPDE
from .reporting import ResidualReport, combine_reports

DEFAULT_TOL = 1e-9
DEFAULT_SEED = 42
DEFAULT_POINTS = 200


# ---------------------------------------------------------------------------
# models
# ---------------------------------------------------------------------------


@dataclass
class PCHSystem:
    """ẋ = (J−R)∇H + g·u with skew J, symmetric PSD R."""

    states: tuple
    J: list
    R: list
    H: Expr
    g: list
    g_perp: list
    domain: Domain = None

    def __post_init__(self):
        self.states = tuple(self.states)
        self.J = as_matrix(self.J)
        self.R = as_matrix(self.R)
        self.H = as_expr(self.H)
        self.g = as_matrix(self.g)
        self.g_perp = as_matrix(self.g_perp)
        n = len(self.states)
        if len(self.J) != n or len(self.R) != n or len(self.g) != n:
            raise DimensionError("J, R, g row counts must match the state dimension")
        if len(self.g_perp) != n - self.m or any(len(r) != n for r in self.g_perp):
            raise DimensionError("g_perp must be (n-m) x n")

    @property
    def n(self):
        return len(self.states)

    @property
    def m(self):
        return len(self.g[0])

    def drift_field(self):
        """(J−R)∇H as a vector of Exprs."""
        JR = mat_sub(self.J, self.R)
        return mat_vec(JR, gradient(self.H, self.states))

    def structure_reports(self, n=DEFAULT_POINTS, tol=DEFAULT_TOL, seed=DEFAULT_SEED):
        """Skewness of J, symmetry/PSD of R, annihilation and rank of g_perp."""
        reports = [
            _matrix_zero_report("J skew", _skew_defect(self.J), self.domain, n, tol, seed),
            _matrix_zero_report("R symmetric", _symmetry_defect(self.R), self.domain, n, tol, seed),
            _matrix_zero_report(
                "g_perp annihilates g", _flatten(mat_mul(self.g_perp, self.g)), self.domain, n, tol, seed
            ),
            _psd_report("R PSD", self.R, self.states, self.domain, n, seed),
            _rank_report("g_perp full rank", self.g_perp, self.domain, n, seed),
        ]
        return reports


@dataclass
class DesiredStructure:
    """Target (J_d, R_d, H_d); H_d may be given as H + H_a."""

    J_d: list
    R_d: list
    H_a: Expr = None
    H_d: Expr = None
    x_star: dict = None

    def __post_init__(self):
        self.J_d = as_matrix(self.J_d)
        self.R_d = as_matrix(self.R_d)
        if self.H_a is not None:
            self.H_a = as_expr(self.H_a)
        if self.H_d is not None:
            self.H_d = as_expr(self.H_d)
        if self.H_a is None and self.H_d is None:
            raise DimensionError("provide H_a or H_d")

    def desired_hamiltonian(self, H):
        if self.H_d is not None:
            return self.H_d
        return Bin("+", as_expr(H), self.H_a)


@dataclass
class MechanicalSystem:
    """Robot in PCH coordinates (q, p): H = ½pᵀM⁻¹p + V."""

    q: tuple
    p: tuple
    M: list
    V: Expr
    G: list
    G_perp: list
    domain: Domain = None

    def __post_init__(self):
        self.q = tuple(self.q)
        self.p = tuple(self.p)
        self.M = as_matrix(self.M)
        self.V = as_expr(self.V)
        self.G = as_matrix(self.G)
        self.G_perp = as_matrix(self.G_perp)
        if len(self.p) != self.n:
            raise DimensionError("q and p must have the same length")

    @property
    def n(self):
        return len(self.q)

    @property
    def m(self):
        return len(self.G[0])

    def minv(self):
        return inverse(self.M)

    def kinetic(self, minv=None):
        minv = minv or self.minv()
        pvec = [Sym(s) for s in self.p]
        return Bin("*", Num(0.5), vec_dot(pvec, mat_vec(minv, pvec)))

    def hamiltonian(self):
        return Bin("+", self.kinetic(), self.V)

    def structure_reports(self, n=DEFAULT_POINTS, tol=DEFAULT_TOL, seed=DEFAULT_SEED):
        """Symmetry/PD of M, annihilation and rank of G_perp."""
        return [
            _matrix_zero_report("M symmetric", _symmetry_defect(self.M), self.domain, n, tol, seed),
            _pd_report("M PD", self.M, self.domain, n, seed),
            _matrix_zero_report(
                "G_perp annihilates G", _flatten(mat_mul(self.G_perp, self.G)), self.domain, n, tol, seed
            ),
            _rank_report("G_perp full rank", self.G_perp, self.domain, n, seed),
        ]


@dataclass
class MechanicalDesired:
    """Shaped structure: M_d, V_d, skew J₂ (directly or via alpha vectors)."""

    M_d: list
    V_d: Expr
    J2: list = None
    alphas: list = None
    K_v: list = None
    q_star: dict = None
    # "shaped" builds J2 around M_d⁻¹p; "open" uses M⁻¹p.
    momentum: str = "shaped"

    def __post_init__(self):
        self.M_d = as_matrix(self.M_d)
        self.V_d = as_expr(self.V_d)
        if self.J2 is not None:
            self.J2 = as_matrix(self.J2)
        if self.alphas is not None:
            self.alphas = [as_vector(a) for a in self.alphas]
        if self.K_v is not None:
            self.K_v = as_matrix(self.K_v)

    def j2_matrix(self, mech):
        if self.J2 is not None:
            return self.J2
        if self.alphas is None:
            return zeros(mech.n, mech.n)
        basis = inverse(self.M_d) if self.momentum == "shaped" else mech.minv()
        p_tilde = mat_vec(basis, [Sym(s) for s in mech.p])
        return build_j2(self.alphas, p_tilde)

    def desired_hamiltonian(self, mech):
        pvec = [Sym(s) for s in mech.p]
        kd = Bin("*", Num(0.5), vec_dot(pvec, mat_vec(inverse(self.M_d), pvec)))
        return Bin("+", kd, self.V_d)


# ---------------------------------------------------------------------------
# matching and control for general PCH systems
# ---------------------------------------------------------------------------


def matching_terms(sys: PCHSystem, des: DesiredStructure):
    """Per-row term pairs of g⊥[(J−R)∇H − (J_d−R_d)∇H_d]."""
    open_field = sys.drift_field()
    H_d = des.desired_hamiltonian(sys.H)
    des_field = mat_vec(mat_sub(des.J_d, des.R_d), gradient(H_d, sys.states))
    rows = []
    for r in sys.g_perp:
        rows.append([vec_dot(r, open_field), Neg(vec_dot(r, des_field))])
    return rows


def matching_residual(sys: PCHSystem, des: DesiredStructure):
    return [simplify(Bin("+", a, b)) for a, b in matching_terms(sys, des)]


def check_matching(
    sys: PCHSystem,
    des: DesiredStructure,
    domain: Domain = None,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n: int = DEFAULT_POINTS,
    name: str = "matching",
) -> ResidualReport:
    domain = domain or sys.domain
    parts = []
    for i, terms in enumerate(matching_terms(sys, des)):
        worst, raw = max_residual(terms, domain, n=n, seed=seed)
        parts.append(ResidualReport(f"{name}[{i}]", n, worst, tol, seed, max_raw_residual=raw))
    return combine_reports(name, parts)


def control_law(sys: PCHSystem, des: DesiredStructure):
    """u = (gᵀg)⁻¹gᵀ[(J_d−R_d)∇H_d − (J−R)∇H]."""
    _guard_input_rank(sys.g, sys.domain)
    gtg_inv = inverse(mat_mul(transpose(sys.g), sys.g))
    H_d = des.desired_hamiltonian(sys.H)
    diff = [
        Bin("-", a, b)
        for a, b in zip(
            mat_vec(mat_sub(des.J_d, des.R_d), gradient(H_d, sys.states)), sys.drift_field()
        )
    ]
    return [simplify(e) for e in mat_vec(mat_mul(gtg_inv, transpose(sys.g)), diff)]


def closed_loop_terms(sys: PCHSystem, des: DesiredStructure, u=None):
    """Per-state term pairs of (J−R)∇H + g·u − (J_d−R_d)∇H_d."""
    u = u if u is not None else control_law(sys, des)
    H_d = des.desired_hamiltonian(sys.H)
    des_field = mat_vec(mat_sub(des.J_d, des.R_d), gradient(H_d, sys.states))
    open_field = sys.drift_field()
    gu = mat_vec(sys.g, u)
    return [[a, b, Neg(c)] for a, b, c in zip(open_field, gu, des_field)]


def _guard_input_rank(g, domain, n=24, seed=DEFAULT_SEED):
    if domain is None:
        return
    from .linalg import det

    d = det(mat_mul(transpose(g), g))
    for bindings in sample_points(domain, n, seed):
        try:
            val = eval_expr(d, bindings)
        except EvalDomainError:
            continue
        if abs(val) < 1e-12:
            raise SingularInputError(f"gᵀg singular at sample {bindings}")


# ---------------------------------------------------------------------------
# mechanical matching: KE-PDE, PE-PDE, control law
# ---------------------------------------------------------------------------


def ke_pde_terms(mech: MechanicalSystem, des: MechanicalDesired):
    """Per-row terms of G⊥{∇_q(pᵀM⁻¹p) − M_dM⁻¹∇_q(pᵀM_d⁻¹p) + 2J₂M_d⁻¹p}."""
    pvec = [Sym(s) for s in mech.p]
    minv = mech.minv()
    mdinv = inverse(des.M_d)
    quad_open = vec_dot(pvec, mat_vec(minv, pvec))
    quad_des = vec_dot(pvec, mat_vec(mdinv, pvec))
    md_minv = mat_mul(des.M_d, minv)
    shaped = mat_vec(md_minv, gradient(quad_des, mech.q))
    j2_term = mat_vec(mat_scale(Num(2), mat_mul(des.j2_matrix(mech), mdinv)), pvec)
    grad_open = gradient(quad_open, mech.q)
    rows = []
    for r in mech.G_perp:
        rows.append([vec_dot(r, grad_open), Neg(vec_dot(r, shaped)), vec_dot(r, j2_term)])
    return rows


def ke_pde_residual(mech, des):
    return [simplify(Bin("+", Bin("+", a, b), c)) for a, b, c in ke_pde_terms(mech, des)]


def pe_pde_terms(mech: MechanicalSystem, des: MechanicalDesired):
    """Per-row terms of G⊥{∇_qV − M_dM⁻¹∇_qV_d}."""
    md_minv = mat_mul(des.M_d, mech.minv())
    shaped = mat_vec(md_minv, gradient(des.V_d, mech.q))
    grad_v = gradient(mech.V, mech.q)
    return [[vec_dot(r, grad_v), Neg(vec_dot(r, shaped))] for r in mech.G_perp]


def pe_pde_residual(mech, des):
    return [simplify(Bin("+", a, b)) for a, b in pe_pde_terms(mech, des)]


def check_pde_rows(
    rows,
    domain: Domain,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n: int = DEFAULT_POINTS,
    name: str = "pde",
) -> ResidualReport:
    """Term-scaled residual report for a list of per-row term lists."""
    parts = []
    for i, terms in enumerate(rows):
        worst, raw = max_residual(terms, domain, n=n, seed=seed)
        parts.append(ResidualReport(f"{name}[{i}]", n, worst, tol, seed, max_raw_residual=raw))
    return combine_reports(name, parts)


def mechanical_control_law(mech: MechanicalSystem, des: MechanicalDesired):
    """τ = (GᵀG)⁻¹Gᵀ(∇_qV − M_dM⁻¹∇_qV_d + ∇_qK − M_dM⁻¹∇_qK_d + (J₂−GK_vGᵀ)∇_pH_d)."""
    _guard_input_rank(mech.G, mech.domain)
    pvec = [Sym(s) for s in mech.p]
    minv = mech.minv()
    mdinv = inverse(des.M_d)
    md_minv = mat_mul(des.M_d, minv)
    K = Bin("*", Num(0.5), vec_dot(pvec, mat_vec(minv, pvec)))
    K_d = Bin("*", Num(0.5), vec_dot(pvec, mat_vec(mdinv, pvec)))
    grad_p_hd = mat_vec(mdinv, pvec)
    kv = des.K_v if des.K_v is not None else zeros(mech.m, mech.m)
    damp = mat_mul(mat_mul(mech.G, kv), transpose(mech.G))
    inner_mat = mat_sub(des.j2_matrix(mech), damp)
    total = []
    shaped_v = mat_vec(md_minv, gradient(des.V_d, mech.q))
    shaped_k = mat_vec(md_minv, gradient(K_d, mech.q))
    damped = mat_vec(inner_mat, grad_p_hd)
    for i in range(mech.n):
        e = Bin("-", differentiate(mech.V, mech.q[i]), shaped_v[i])
        e = Bin("+", e, Bin("-", differentiate(K, mech.q[i]), shaped_k[i]))
        e = Bin("+", e, damped[i])
        total.append(e)
    gtg_inv = inverse(mat_mul(transpose(mech.G), mech.G))
    return [simplify(e) for e in mat_vec(mat_mul(gtg_inv, transpose(mech.G)), total)]


def mechanical_fields(mech: MechanicalSystem, des: MechanicalDesired, tau=None):
    """(open-loop field with τ, desired field) over the stacked (q, p) state."""
    tau = tau if tau is not None else mechanical_control_law(mech, des)
    pvec = [Sym(s) for s in mech.p]
    minv = mech.minv()
    H = mech.hamiltonian()
    open_q = mat_vec(minv, pvec)
    g_tau = mat_vec(mech.G, tau)
    open_p = [Bin("+", Neg(differentiate(H, qi)), g_tau[i]) for i, qi in enumerate(mech.q)]

    mdinv = inverse(des.M_d)
    H_d = des.desired_hamiltonian(mech)
    grad_q_hd = gradient(H_d, mech.q)
    grad_p_hd = mat_vec(mdinv, pvec)
    kv = des.K_v if des.K_v is not None else zeros(mech.m, mech.m)
    damp = mat_mul(mat_mul(mech.G, kv), transpose(mech.G))
    md_minv = mat_mul(des.M_d, minv)
    des_q = mat_vec(mat_mul(minv, des.M_d), grad_p_hd)
    des_p = [
        Bin(
            "+",
            Neg(vec_dot(row, grad_q_hd)),
            vec_dot(jrow, grad_p_hd),
        )
        for row, jrow in zip(md_minv, mat_sub(des.j2_matrix(mech), damp))
    ]
    return (open_q + open_p, des_q + des_p)


def mechanical_closed_loop_terms(mech, des, tau=None):
    open_field, des_field = mechanical_fields(mech, des, tau)
    return [[a, Neg(b)] for a, b in zip(open_field, des_field)]


# ---------------------------------------------------------------------------
# J2 construction and the reduced KE-PDE system
# ---------------------------------------------------------------------------


def build_j2(alphas, p_tilde):
    """Skew J₂ with upper entries p̃ᵀα_k, pairs ordered (1,2),(1,3),…,(n−1,n)."""
    n = len(p_tilde)
    n0 = n * (n - 1) // 2
    if len(alphas) != n0:
        raise DimensionError(f"need {n0} alpha vectors for n = {n}, got {len(alphas)}")
    for a in alphas:
        if len(a) != n:
            raise DimensionError("each alpha vector must have length n")
    out = zeros(n, n)
    k = 0
    for i in range(n):
        for j in range(i + 1, n):
            entry = simplify(vec_dot(p_tilde, alphas[k]))
            out[i][j] = entry
            out[j][i] = simplify(Neg(entry))
            k += 1
    return out


def _pair_basis(n):
    """W matrices W^(ij) = F^(ij) − (F^(ij))ᵀ in the (1,2),(1,3),…,(n−1,n) order."""
    mats = []
    for i in range(n):
        for j in range(i + 1, n):
            W = [[0.0] * n for _ in range(n)]
            W[i][j] = 1.0
            W[j][i] = -1.0
            mats.append(W)
    return mats


def ke_matching_system(mech: MechanicalSystem, M_d, alphas=None):
    """Component equations Σ_i γ_i ∂(M_d)_kl/∂q_i = −m·(𝒥Aᵀ + A𝒥ᵀ)_kl.

    γ = G⊥M_dM⁻¹, A stacks −W_k(G⊥)ᵀ row-wise, and 𝒥 has the α vectors as
    columns.  With symbolic alphas (None) the α components stay as symbols
    alpha<k>_<j>; otherwise the given vectors are substituted.  Returns a
    list of ((k, l), lhs: Expr, rhs: Expr) for the upper triangle.
    """
    M_d = as_matrix(M_d)
    n = mech.n
    if len(mech.G_perp) == 0:
        return []
    if len(mech.G_perp) != 1:
        raise DimensionError("reduced KE-PDE system implemented for one unactuated direction")
    n0 = n * (n - 1) // 2
    if alphas is None:
        alphas = [[Sym(f"alpha{k + 1}_{j + 1}") for j in range(n)] for k in range(n0)]
    else:
        alphas = [as_vector(a) for a in alphas]
        if len(alphas) != n0:
            raise DimensionError(f"need {n0} alpha vectors")
    gperp = mech.G_perp[0]
    gamma = mat_mul([gperp], mat_mul(M_d, mech.minv()))[0]
    # columns of A are −W_k(G⊥)ᵀ; stored row-stacked, i.e. as Aᵀ (n0 x n)
    At = []
    for W in _pair_basis(n):
        col = mat_vec(as_matrix(W), gperp)
        At.append([simplify(Neg(e)) for e in col])
    Jm = transpose(alphas)  # n x n0, alpha vectors as columns
    JAt = mat_mul(Jm, At)
    rhs_mat = [[simplify(Neg(Bin("+", JAt[i][j], JAt[j][i]))) for j in range(n)] for i in range(n)]
    out = []
    for k in range(n):
        for l in range(k, n):
            lhs = Num(0)
            for i, qi in enumerate(mech.q):
                lhs = Bin("+", lhs, Bin("*", gamma[i], differentiate(M_d[k][l], qi)))
            out.append(((k, l), simplify(lhs), rhs_mat[k][l]))
    return out


def to_characteristics(
    residual: Expr,
    indep_vars,
    unknown: str,
    grad_names,
    domain: Domain = None,
) -> FirstOrderPDE:
    """Read Σ P_i ∂z/∂x_i = R off a residual that is affine in the gradient.

    The gradient components appear in `residual` as the placeholder symbols
    `grad_names` (in the order of `indep_vars`).  The PDE is residual = 0,
    so P_i = ∂residual/∂g_i and R = −residual with the placeholders zeroed.
    """
    residual = as_expr(residual)
    indep_vars = tuple(indep_vars)
    grad_names = tuple(grad_names)
    if len(grad_names) != len(indep_vars):
        raise DimensionError("one gradient placeholder per independent variable")
    P = []
    for gname in grad_names:
        coeff = simplify(differentiate(residual, gname))
        for other in grad_names:
            if other in free_symbols(coeff):
                raise NotAffineError(
                    f"residual is not affine in the gradient: coefficient of {gname} "
                    f"still references {other}"
                )
        P.append(coeff)
    zeroed = {gname: Num(0) for gname in grad_names}
    R = simplify(Neg(substitute(residual, zeroed)))
    return FirstOrderPDE(indep_vars, unknown, P, R, domain)


# ---------------------------------------------------------------------------
# equilibrium assignment
# ---------------------------------------------------------------------------


@dataclass
class EquilibriumReport:
    """Gradient and finite-difference Hessian evidence at a candidate point."""

    x_star: dict
    grad_norm: float
    eigenvalues: list
    tolerance: float
    verdict: str = ""
    note: str = ""

    def __post_init__(self):
        if not self.verdict:
            if self.grad_norm > self.tolerance:
                self.verdict = "not-stationary"
            elif min(self.eigenvalues) > 0.0:
                self.verdict = "minimum"
            else:
                self.verdict = "stationary-only"

    @property
    def passed(self):
        return self.verdict == "minimum"

    def to_dict(self):
        return {
            "x_star": dict(self.x_star),
            "grad_norm": self.grad_norm,
            "hessian_eigenvalues": list(self.eigenvalues),
            "tolerance": self.tolerance,
            "verdict": self.verdict,
            "pass": self.passed,
        }

    def __str__(self):
        flag = "PASS" if self.passed else self.verdict.upper()
        return (
            f"[{flag}] equilibrium: |grad| = {self.grad_norm:.3e} "
            f"(tol {self.tolerance:.1e}), eig {', '.join(f'{e:.3g}' for e in self.eigenvalues)}"
        )


def equilibrium_assignment_check(
    H_d: Expr,
    x_star: dict,
    params: dict = None,
    tol: float = 1e-8,
) -> EquilibriumReport:
    """∇H_d(x*) ≈ 0 plus positive finite-difference Hessian eigenvalues."""
    H_d = as_expr(H_d)
    names = sorted(x_star)
    bindings = {**(params or {}), **x_star}
    grads = [differentiate(H_d, v) for v in names]
    try:
        gvals = [eval_expr(g, bindings) for g in grads]
    except EvalDomainError as exc:
        raise EvalDomainError(f"H_d gradient undefined at x*: {exc}") from exc
    hess = np.zeros((len(names), len(names)))
    for i, gi in enumerate(grads):
        for j, vj in enumerate(names):
            hess[i, j] = central_difference(gi, vj, bindings, rel_h=1e-5)
    hess = 0.5 * (hess + hess.T)
    eig = sorted(float(v) for v in np.linalg.eigvalsh(hess))
    return EquilibriumReport(dict(x_star), float(np.linalg.norm(gvals)), eig, tol)


def calibrate_equilibrium(
    H_d: Expr,
    free_params,
    x_star: dict,
    params: dict = None,
    tol: float = 1e-8,
    max_iter: int = 60,
):
    """Solve ∇H_d(x*) = 0 for the listed parameters, then re-check x*.

    Damped Gauss-Newton on the stacked gradient; returns
    (bound parameter dict, EquilibriumReport).  Non-convergence is reported
    in the note, not raised.
    """
    H_d = as_expr(H_d)
    free_params = list(free_params)
    names = sorted(x_star)
    grads = [differentiate(H_d, v) for v in names]
    theta = np.array([float((params or {}).get(f, 0.0)) for f in free_params])
    base = {**(params or {}), **x_star}

    def residual_vec(th):
        b = dict(base)
        b.update(zip(free_params, th))
        return np.array([eval_expr(g, b) for g in grads])

    note = ""
    try:
        r = residual_vec(theta)
        for _ in range(max_iter):
            if np.linalg.norm(r) <= tol:
                break
            Jac = np.zeros((len(names), len(free_params)))
            for j in range(len(free_params)):
                h = 1e-6 * max(1.0, abs(theta[j]))
                up, dn = theta.copy(), theta.copy()
                up[j] += h
                dn[j] -= h
                Jac[:, j] = (residual_vec(up) - residual_vec(dn)) / (2 * h)
            step, *_ = np.linalg.lstsq(Jac, -r, rcond=None)
            lam = 1.0
            for _ in range(20):
                trial = theta + lam * step
                rt = residual_vec(trial)
                if np.linalg.norm(rt) < np.linalg.norm(r):
                    theta, r = trial, rt
                    break
                lam *= 0.5
            else:
                note = "no descent step found"
                break
        else:
            note = f"gradient norm {np.linalg.norm(r):.2e} after {max_iter} iterations"
    except EvalDomainError as exc:
        raise PfidaError(f"calibration evaluation left the domain: {exc}") from exc

    bound = dict(zip(free_params, (float(t) for t in theta)))
    merged = {**(params or {}), **bound}
    report = equilibrium_assignment_check(H_d, x_star, merged, tol)
    if note:
        report.note = note
    return bound, report


# ---------------------------------------------------------------------------
# structural report helpers
# ---------------------------------------------------------------------------


def _skew_defect(A):
    return _flatten([[Bin("+", A[i][j], A[j][i]) for j in range(len(A))] for i in range(len(A))])


def _symmetry_defect(A):
    return _flatten([[Bin("-", A[i][j], A[j][i]) for j in range(len(A))] for i in range(len(A))])


def _flatten(A):
    return [e for row in A for e in row]


def _matrix_zero_report(name, exprs, domain, n, tol, seed):
    worst = 0.0
    raw = 0.0
    for e in exprs:
        s = simplify(e)
        if isinstance(s, Num) and s.value == 0.0:
            continue
        w, r = max_residual([s], domain, n=n, seed=seed)
        worst, raw = max(worst, w), max(raw, r)
    return ResidualReport(name, n, worst, tol, seed, max_raw_residual=raw)


def _eval_matrix(A, bindings):
    return np.array([[eval_expr(e, bindings) for e in row] for row in A])


def _pd_report(name, A, domain, n, seed):
    worst = float("inf")
    for bindings in sample_points(domain, n, seed):
        vals = _eval_matrix(A, bindings)
        worst = min(worst, float(np.linalg.eigvalsh(0.5 * (vals + vals.T)).min()))
    passed = worst > 0.0
    return ResidualReport(name, n, 0.0 if passed else abs(worst), 1e-12, seed,
                          note=f"smallest eigenvalue {worst:.3e}")


def _psd_report(name, A, states, domain, n, seed, floor=-1e-10):
    worst = 0.0
    for bindings in sample_points(domain, n, seed):
        vals = _eval_matrix(A, bindings)
        eig = np.linalg.eigvalsh(0.5 * (vals + vals.T))
        worst = min(worst, float(eig.min())) if eig.min() < worst else worst
    return ResidualReport(name, n, max(0.0, -worst), -floor, seed,
                          note=f"most negative eigenvalue {worst:.3e}")


def _rank_report(name, A, domain, n, seed):
    want = min(len(A), len(A[0]))
    bad = 0
    for bindings in sample_points(domain, n, seed):
        vals = _eval_matrix(A, bindings)
        if np.linalg.matrix_rank(vals, tol=1e-9) < want:
            bad += 1
    return ResidualReport(name, n, float(bad), 0.0, seed,
                          note=f"{bad} rank-deficient samples")
