"""Magnetic levitation benchmark.

A coil levitating a ball, modeled as a third-order PCH system with flux,
position, and momentum states.  The target design modifies the
interconnection so the flux row couples to momentum through a
state-dependent gain; the resulting matching PDE is solved by a
homogeneous/non-homogeneous split.  The published non-homogeneous part
carries a sign error in its last term; both versions ship as variants.
"""

from __future__ import annotations

from ..expr import Domain, differentiate, max_residual, parse, simplify
from ..idapbc import (
    DesiredStructure,
    PCHSystem,
    check_matching,
    closed_loop_terms,
    check_pde_rows,
)
from ..pfaffian import (
    CharacteristicSystem,
    FirstOrderPDE,
    PfaffianForm,
    characteristic_residuals,
    check_pde_solution,
    exactness_defect,
    five_stage_solve,
    lemma1_check,
)
from ..reporting import ResidualReport, combine_reports
from .core import BenchmarkCase, Variant

PARAMS = {
    "k": 1.0,
    "m": 1.0,
    "g": 9.81,
    "r": 1.0,
    "c1": 0.3,
    "c2": 0.7,
    "c3": 0.2,
    "kp": 1.0,
}

# the flux-row coupling gain; chosen affine in (x1, x2) so the matching
# PDE has constant-coefficient characteristics
ALPHA = "-1/(c1*x1 + c2*x2 + c3)"

NONHOM = (
    "x1*x2/(c2*k) - x2/(c2^2*k) - x1^2/(2*k) - c1*x1^3/(3*c2*k)"
    " - c3*x1^2/(2*c2*k) + c1*x1^2/(2*c2^2*k) + c3*x1/(c2^2*k)"
)
NONHOM_PRINTED = (
    "x1*x2/(c2*k) - x2/(c2^2*k) - x1^2/(2*k) - c1*x1^3/(3*c2*k)"
    " - c3*x1^2/(2*c2*k) + c1*x1^2/(2*c2^2*k) - c3*x1/(c2^2*k)"
)
SHAPE_ARG = "(c1/c2*x1 + x2 + c3/c2 + c1/c2^2)*exp(-c2*x1)"
HOM = f"kp*0.5*(({SHAPE_ARG}) - ss)^2 + ks*(({SHAPE_ARG}) - ss)"


def _equilibrium_constants():
    """Center of the shaping argument and the linear weight that makes the
    target stationary; the slope is forced because the residual gradient at
    the target is parallel to the argument's gradient there."""
    from ..expr import differentiate, eval_expr

    x1s = (2 * PARAMS["k"] * PARAMS["m"] * PARAMS["g"]) ** 0.5
    point = {**PARAMS, "x1": x1s, "x2": 0.5, "x3": 0.0}
    S = parse(SHAPE_ARG)
    ss = eval_expr(S, point)
    H = parse("1/(2*k)*(1 - x2)*x1^2 + x3^2/(2*m) + m*g*x2")
    N = parse(NONHOM)
    num = eval_expr(differentiate(H, "x1"), point) + eval_expr(differentiate(N, "x1"), point)
    den = eval_expr(differentiate(S, "x1"), point)
    return {"x1s": x1s, "ss": ss, "ks": -num / den}


_EQ = _equilibrium_constants()
PARAMS["ss"] = _EQ["ss"]
PARAMS["ks"] = _EQ["ks"]

# separable exact form in (x1, x2, Ha) whose potential is Ha - nonhom
SEP_DX1 = (
    "-x2/(c2*k) + x1/k + c1*x1^2/(c2*k) + c3*x1/(c2*k)"
    " - c1*x1/(c2^2*k) - c3/(c2^2*k)"
)
SEP_DX2 = "-x1/(c2*k) + 1/(c2^2*k)"


def build() -> BenchmarkCase:
    domain = Domain(
        {"x1": (0.5, 1.5), "x2": (0.2, 0.8), "x3": (-1.0, 1.0)},
        params=PARAMS,
    )
    model = PCHSystem(
        ("x1", "x2", "x3"),
        J=[["0", "0", "0"], ["0", "0", "1"], ["0", "-1", "0"]],
        R=[["r", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
        H=parse("1/(2*k)*(1 - x2)*x1^2 + x3^2/(2*m) + m*g*x2"),
        g=[["1"], ["0"], ["0"]],
        g_perp=[["0", "1", "0"], ["0", "0", "1"]],
        domain=domain,
    )
    desired = DesiredStructure(
        J_d=[["0", "0", f"-({ALPHA})"], ["0", "0", "1"], [ALPHA, "-1", "0"]],
        R_d=[["r", "0", "0"], ["0", "0", "0"], ["0", "0", "0"]],
        H_a=parse(f"{NONHOM} + {HOM}"),
        x_star={"x1": _EQ["x1s"], "x2": 0.5, "x3": 0.0},
    )
    case = BenchmarkCase(
        name="maglev",
        title="Magnetic levitation (flux, position, momentum)",
        kind="pch",
        model=model,
        desired=desired,
        solutions={
            "extra_energy_nonhom": parse(NONHOM),
            "shaping_argument": parse(SHAPE_ARG),
            "extra_energy_hom": parse(HOM),
            "separable_form_dx1": parse(SEP_DX1),
            "separable_form_dx2": parse(SEP_DX2),
        },
        variants=[
            Variant(
                "extra_energy_nonhom_printed",
                parse(NONHOM_PRINTED),
                expect_pass=False,
                note="published last term has a flipped sign; constant residual -2*c3/(c2^2*k)",
            ),
        ],
        x_star=desired.x_star,
        params=PARAMS,
        free_params=("ks",),
        sim=None,
        coverage={
            "open-loop structure": "structure",
            "matching equations": "matching",
            "first-order PDE for the energy extra": "pde-split",
            "characteristic chain": "pde-split",
            "separable exact form": "separable-form-exact",
            "non-homogeneous solution": "pde-split / nonhom-printed-variant",
            "integrating factor equation": "five-stage-hom",
            "homogeneous solution": "pde-split",
        },
        notes=(
            "The shaping function phi and the chain constants c1..c3 are "
            "design freedom; phi is bound to a quadratic for the checks."
        ),
    )
    return case


def _pde(domain) -> FirstOrderPDE:
    return FirstOrderPDE(
        ("x1", "x2"),
        "Ha",
        ("1", "c1*x1 + c2*x2 + c3"),
        "-(1/k)*(1 - x2)*x1",
        domain,
    )


def checks(case: BenchmarkCase, n, tol, seed):
    model, des, dom = case.model, case.desired, case.domain
    reports = list(model.structure_reports(n=n, tol=tol, seed=seed))
    reports.append(check_matching(model, des, dom, tol=tol, seed=seed, n=n))

    pde = _pde(dom)
    reports.append(
        lemma1_check(
            pde,
            [case.solutions["extra_energy_hom"]],
            case.solutions["extra_energy_nonhom"],
            domain=dom, tol=tol, seed=seed, n=n,
            name="pde-split",
        )
    )
    printed = case.variants[0]
    rep = check_pde_solution(
        pde, printed.expr, dom, tol=tol, seed=seed, n=n, name="nonhom-printed-variant"
    )
    rep.note = printed.note
    reports.append(rep)
    # pin the printed variant's defect: residual - (-2*c3/(c2^2*k)) == 0
    resid = _pde_residual_terms(pde, printed.expr)
    resid.append(parse("2*c3/(c2^2*k)"))
    worst, raw = max_residual(resid, dom, n=n, seed=seed)
    reports.append(
        ResidualReport(
            "printed-variant residual equals -2*c3/(c2^2*k)",
            n, worst, tol, seed, max_raw_residual=raw,
        )
    )

    sep = PfaffianForm(
        ("x1", "x2", "Ha"),
        (case.solutions["separable_form_dx1"], case.solutions["separable_form_dx2"], "1"),
        domain=Domain({**dom.box, "Ha": (-1.0, 1.0)}, dom.exclusions, dom.params),
    )
    parts = []
    for pair, d in zip(("12", "13", "23"), exactness_defect(sep)):
        worst, raw = max_residual([d], sep.domain, n=n, seed=seed)
        parts.append(
            ResidualReport(f"defect[{pair}]", n, worst, tol, seed, max_raw_residual=raw)
        )
    reports.append(combine_reports("separable-form-exact", parts))
    # its (x1, x2) coefficients are exactly -grad(nonhom)
    nh = case.solutions["extra_energy_nonhom"]
    for var, coeff in (("x1", sep.coeffs[0]), ("x2", sep.coeffs[1])):
        worst, raw = max_residual([coeff, differentiate(nh, var)], dom, n=n, seed=seed)
        reports.append(
            ResidualReport(
                f"separable-form d{var} coefficient is -d(nonhom)/d{var}",
                n, worst, tol, seed, max_raw_residual=raw,
            )
        )

    # the homogeneous two-form needs the integrating factor exp(-c2*x1);
    # the staged solver must find it and land on the shaping argument
    hom_form = PfaffianForm(
        ("x1", "x2", "x3"),
        ("c1*x1 + c2*x2 + c3", "-1", "0"),
        domain=dom,
    )
    trace = five_stage_solve(hom_form)
    solver_rep = trace.residual_report
    solver_rep.name = "five-stage-hom"
    reports.append(solver_rep)
    reports.extend(
        characteristic_residuals(
            CharacteristicSystem(pde),
            [case.solutions["shaping_argument"]],
            domain=dom, tol=tol, seed=seed, n=n,
        )
    )

    reports.append(
        check_pde_rows(
            closed_loop_terms(model, des), dom, tol=tol, seed=seed, n=n, name="closed-loop"
        )
    )

    # the linear shaping weight is fixed by stationarity at the target
    from ..idapbc import calibrate_equilibrium, equilibrium_assignment_check

    H_d = des.desired_hamiltonian(model.H)
    eq = equilibrium_assignment_check(H_d, case.x_star, PARAMS, tol=1e-8)
    reports.append(
        ResidualReport(
            "equilibrium-assignment",
            n,
            eq.grad_norm,
            1e-8,
            seed,
            note=(
                f"verdict {eq.verdict}; eigenvalues "
                f"{', '.join(f'{e:.3g}' for e in eq.eigenvalues)}; shaping in the "
                "chain argument alone cannot lift the level-set-tangent curvature"
            ),
        )
    )
    bound, _ = calibrate_equilibrium(H_d, ("ks",), case.x_star, PARAMS)
    err = abs(bound["ks"] - PARAMS["ks"]) / max(1.0, abs(PARAMS["ks"]))
    reports.append(
        ResidualReport(
            "calibrated-linear-weight", n, err, 1e-6, seed,
            note=f"ks = {bound['ks']:.6f} re-derived from the stationarity condition",
        )
    )
    return reports


def _pde_residual_terms(pde, candidate):
    from ..expr import Bin, Neg, substitute

    sub = {pde.unknown: candidate}
    terms = [
        simplify(Bin("*", substitute(p, sub), differentiate(candidate, v)))
        for v, p in zip(pde.indep_vars, pde.P)
    ]
    terms.append(simplify(Neg(substitute(pde.R, sub))))
    return terms
