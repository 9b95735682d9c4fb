"""Two-link pendulum with only the first joint actuated.

The kinetic-energy matching PDE is reduced by scaling the shaped mass
matrix through lambda = M_d M^{-1} and tying its second row together
with lambda4 = k*lambda3.  At k = -1 the chain collapses to a separable
equation d(lambda3)/lambda3 = tan(q2) dq2 with solution -1/cos(q2).
The potential PDE is solved by an exact-form construction whose
potential is c5*g*sin(q1+q2)*sin(q2).

The off-diagonal gyroscopic term J2 that absorbs the two remaining
kinetic rows is derived here from the row quadratic itself: the row is
a quadratic form in momentum and factors as 2*(w.p)*(v.p) with v the
first row of M_d^{-1}; the consistency of that factorization is one of
the checks.  The resulting M_d has a negative lower-right entry at
every configuration, so the shaped energy has no minimum and the
closed-loop simulation is gated.
"""

from __future__ import annotations

from ..expr import Bin, Domain, Neg, Num, Sym, differentiate, max_residual, parse, simplify, substitute
from ..idapbc import (
    MechanicalDesired,
    MechanicalSystem,
    check_pde_rows,
    ke_pde_terms,
    mechanical_closed_loop_terms,
    pe_pde_terms,
)
from ..linalg import inverse, mat_mul
from ..pfaffian import (
    CharacteristicSystem,
    FirstOrderPDE,
    PfaffianForm,
    characteristic_residuals,
    check_pde_solution,
    exactness_defect,
    lemma1_check,
)
from ..reporting import ResidualReport, combine_reports
from .core import BenchmarkCase, SimScenario

# link constants from unit masses and lengths: m1 = m2 = 1, l1 = 1,
# lc1 = lc2 = 0.5, I1 = I2 = 1/12
_PHYS = {"m1": 1.0, "m2": 1.0, "l1": 1.0, "lc1": 0.5, "lc2": 0.5, "I1": 1.0 / 12.0, "I2": 1.0 / 12.0}
PARAMS = {
    "c1": _PHYS["m1"] * _PHYS["lc1"] ** 2 + _PHYS["m2"] * _PHYS["l1"] ** 2 + _PHYS["I1"],
    "c2": _PHYS["m2"] * _PHYS["lc2"] ** 2 + _PHYS["I2"],
    "c3": _PHYS["m2"] * _PHYS["l1"] * _PHYS["lc2"],
    "c4": _PHYS["m1"] * _PHYS["lc1"] + _PHYS["m2"] * _PHYS["l1"],
    "c5": _PHYS["m2"] * _PHYS["lc2"],
    "g": 9.81,
    "k": -1.0,
    "kp": 1.0,
    "kv": 1.0,
}

LAM3 = "-1/cos(q2)"
LAM4 = "1/cos(q2)"
V_D_NONHOM = "c5*g*sin(q1+q2)*sin(q2)"
V_D_HOM = "kp*0.5*(q1+q2)^2"
PE_F1 = "c5*g*sin(q2)*cos(q1+q2)"
PE_F2 = "c5*g*sin(q1+2*q2)"


def _mass_matrix():
    return [
        ["c1 + c2 + 2*c3*cos(q2)", "c2 + c3*cos(q2)"],
        ["c2 + c3*cos(q2)", "c2"],
    ]


def _shaped_mass():
    """M_d = lambda*M with lambda2 fixed by symmetry of the product."""
    M = _mass_matrix()
    lam2 = (
        f"(({LAM3})*({M[0][0]}) + ({LAM4})*({M[0][1]}) - ({M[0][1]}))/({M[1][1]})"
    )
    lam = [["1", lam2], [LAM3, LAM4]]
    md = mat_mul([[parse(e) for e in row] for row in lam], [[parse(e) for e in row] for row in M])
    return [[simplify(e) for e in row] for row in md]


def _derived_j2(mech, M_d):
    """Factor the unactuated KE row as 2*(w.p)*(v.p); J2 = [[0, w.p], [-w.p, 0]]."""
    base = MechanicalDesired(M_d, parse("0"), J2=[["0", "0"], ["0", "0"]])
    row = ke_pde_terms(mech, base)[0]
    total = row[0]
    for t in row[1:]:
        total = Bin("+", total, t)
    total = simplify(total)
    zero_p = {s: Num(0) for s in mech.p}
    p1, p2 = mech.p
    d11 = simplify(differentiate(simplify(differentiate(total, p1)), p1))
    d12 = simplify(differentiate(simplify(differentiate(total, p1)), p2))
    d22 = simplify(differentiate(simplify(differentiate(total, p2)), p2))
    A = simplify(substitute(Bin("*", Num(0.5), d11), zero_p))
    B = simplify(substitute(d12, zero_p))
    C = simplify(substitute(Bin("*", Num(0.5), d22), zero_p))
    v = inverse(M_d)[0]
    w1 = simplify(Bin("/", A, Bin("*", Num(2), v[0])))
    w2 = simplify(Bin("/", C, Bin("*", Num(2), v[1])))
    j = simplify(Bin("+", Bin("*", w1, Sym(p1)), Bin("*", w2, Sym(p2))))
    # cross-term consistency: B must equal 2*(w1*v2 + w2*v1)
    cross = [B, Neg(Bin("*", Num(2), Bin("+", Bin("*", w1, v[1]), Bin("*", w2, v[0]))))]
    return [[Num(0), j], [Neg(j), Num(0)]], cross


def build() -> BenchmarkCase:
    half_pi = 1.5707963267948966
    domain = Domain(
        {
            "q1": (-3.0, 3.0),
            "q2": (-(half_pi - 0.05), half_pi - 0.05),
            "p1": (-1.0, 1.0),
            "p2": (-1.0, 1.0),
        },
        params=PARAMS,
    )
    mech = MechanicalSystem(
        ("q1", "q2"),
        ("p1", "p2"),
        M=_mass_matrix(),
        V=parse("-c4*g*cos(q1) - c5*g*cos(q1+q2)"),
        G=[["1"], ["0"]],
        G_perp=[["0", "1"]],
        domain=domain,
    )
    M_d = _shaped_mass()
    J2, cross = _derived_j2(mech, M_d)
    desired = MechanicalDesired(
        M_d=M_d,
        V_d=parse(f"{V_D_NONHOM} + {V_D_HOM}"),
        J2=J2,
        K_v=[["kv"]],
        q_star={"q1": 0.0, "q2": 0.0},
    )
    case = BenchmarkCase(
        name="pendubot",
        title="Two-link pendulum, first joint actuated",
        kind="mechanical",
        model=mech,
        desired=desired,
        solutions={
            "mass_scaling": parse(LAM3),
            "potential_nonhom": parse(V_D_NONHOM),
            "potential_argument": parse("q1 + q2"),
        },
        x_star={"q1": 0.0, "q2": 0.0, "p1": 0.0, "p2": 0.0},
        params=PARAMS,
        sim=SimScenario(
            x0=(0.1, 0.1, 0.0, 0.0),
            q_star=(0.0, 0.0),
            gated=True,
            gate_note=(
                "the shaped mass matrix has M_d[2][2] = -c3 < 0 at every "
                "configuration, so the shaped energy is not a Lyapunov "
                "candidate and the closed loop is not run"
            ),
        ),
        coverage={
            "open-loop structure": "structure",
            "reduced kinetic-energy PDE": "reduced-ke-identity / mass-scaling-ode",
            "kinetic-energy matching": "ke-pde / j2-cross-term-consistency",
            "potential matching chain": "pe-split",
            "exact-form construction": "pe-form-exact / pe-form-coefficients",
            "potential solution": "pe-split / pe-pde",
        },
        notes=(
            "J2 is reconstructed from the row quadratic rather than quoted; "
            "the exact-form sign convention is f1 dq1 + f2 dq2 - dV_d = 0."
        ),
    )
    case._cross_terms = cross
    return case


def checks(case: BenchmarkCase, n, tol, seed):
    mech, des, dom = case.model, case.desired, case.domain
    reports = list(mech.structure_reports(n=n, tol=tol, seed=seed))

    # the defaults must reduce to the exact fractions the physical values imply
    expected = {"c1": 4.0 / 3.0, "c2": 1.0 / 3.0, "c3": 0.5, "c4": 1.5, "c5": 0.5}
    err = max(abs(PARAMS[name] - v) for name, v in expected.items())
    reports.append(
        ResidualReport(
            "link-constant-reduction", len(expected), err, 1e-12, seed,
            note="c1..c5 from unit masses and lengths",
        )
    )

    # shaped mass symmetry and its fixed-sign lower-right entry
    sym_defect = [Bin("-", des.M_d[0][1], des.M_d[1][0])]
    worst, raw = max_residual(sym_defect, dom, n=n, seed=seed)
    reports.append(ResidualReport("M_d symmetric", n, worst, tol, seed, max_raw_residual=raw))
    worst, raw = max_residual([des.M_d[1][1], parse("c3")], dom, n=n, seed=seed)
    reports.append(
        ResidualReport(
            "M_d[2][2] equals -c3 (indefinite; simulation gated)",
            n, worst, tol, seed, max_raw_residual=raw,
            note=case.sim.gate_note,
        )
    )

    # the reduced KE identity the scaling pair must satisfy
    lam3, lam4 = parse(LAM3), parse(LAM4)
    inner = Bin(
        "+",
        Bin("*", lam3, parse("c2 + c3*cos(q2)")),
        Bin("*", lam4, parse("c2")),
    )
    reduced = Bin(
        "+",
        Bin("*", parse("2*c3*sin(q2)"), Bin("+", Bin("^", lam3, Num(2)), Bin("*", lam3, lam4))),
        Bin("*", lam4, differentiate(inner, "q2")),
    )
    worst, raw = max_residual([reduced], dom, n=n, seed=seed)
    reports.append(ResidualReport("reduced-ke-identity", n, worst, tol, seed, max_raw_residual=raw))

    # the separable chain for the scaling itself
    ode = FirstOrderPDE(
        ("q2",),
        "lam",
        ("k*lam*(c2 + c3*cos(q2) + k*c2)",),
        "-c3*lam^2*sin(q2)*(2+k)",
        dom,
    )
    reports.append(
        check_pde_solution(ode, case.solutions["mass_scaling"], dom, tol=tol, seed=seed, n=n, name="mass-scaling-ode")
    )

    worst, raw = max_residual(case._cross_terms, dom, n=n, seed=seed)
    reports.append(
        ResidualReport("j2-cross-term-consistency", n, worst, tol, seed, max_raw_residual=raw)
    )
    reports.append(check_pde_rows(ke_pde_terms(mech, des), dom, tol=tol, seed=seed, n=n, name="ke-pde"))
    reports.append(check_pde_rows(pe_pde_terms(mech, des), dom, tol=tol, seed=seed, n=n, name="pe-pde"))

    pe = FirstOrderPDE(("q1", "q2"), "Vd", (LAM3, LAM4), "c5*g*sin(q1+q2)", dom)
    reports.append(
        lemma1_check(
            pe,
            [parse(V_D_HOM)],
            case.solutions["potential_nonhom"],
            domain=dom, tol=tol, seed=seed, n=n,
            name="pe-split",
        )
    )
    reports.extend(
        characteristic_residuals(
            CharacteristicSystem(pe),
            [case.solutions["potential_argument"]],
            domain=dom, tol=tol, seed=seed, n=n,
        )
    )

    # exact one-form behind the particular solution
    form_dom = Domain({**dom.box, "Vd": (-1.0, 1.0)}, dom.exclusions, dom.params)
    form = PfaffianForm(("q1", "q2", "Vd"), (PE_F1, PE_F2, "-1"), domain=form_dom)
    parts = []
    for pair, d in zip(("12", "13", "23"), exactness_defect(form)):
        worst, raw = max_residual([d], form_dom, n=n, seed=seed)
        parts.append(ResidualReport(f"defect[{pair}]", n, worst, tol, seed, max_raw_residual=raw))
    reports.append(combine_reports("pe-form-exact", parts))
    # its coefficients must reproduce both defining equations for f2
    coeff_checks = [
        ("pe-form chain balance", [parse(PE_F2), Neg(parse(PE_F1)), Neg(parse("c5*g*cos(q2)*sin(q1+q2)"))]),
        (
            "pe-form f2 equation",
            [
                differentiate(parse(PE_F2), "q1"),
                Neg(differentiate(parse(PE_F2), "q2")),
                parse("c5*g*cos(q1+2*q2)"),
            ],
        ),
    ]
    sub_parts = []
    for cname, terms in coeff_checks:
        worst, raw = max_residual(terms, dom, n=n, seed=seed)
        sub_parts.append(ResidualReport(cname, n, worst, tol, seed, max_raw_residual=raw))
    reports.append(combine_reports("pe-form-coefficients", sub_parts))

    reports.append(
        check_pde_rows(
            mechanical_closed_loop_terms(mech, des), dom, tol=tol, seed=seed, n=n, name="closed-loop"
        )
    )
    return reports
