"""Cable-suspended point mass with out-of-plane swing.

Two cables anchor a payload of mass m in the x-y plane; the z direction
is the unactuated swing.  Total energy shaping: the lower-right block of
the shaped mass matrix is built from the component form of the
kinetic-energy matching system, the coupling entry yz/2 comes from a
characteristic chain, and the shaped potential follows from a chain
whose first integrals are x and s = k2*y^2 + k1*z^2.

The printed chain for the coupling entry shows a last leg twice as
large as the one its stated solution satisfies; the suite pins the
corrected leg to half the printed one and records the doubled variant
as a failing solution.

The swing coordinate is only coupled to the actuated plane through the
shaped energy, so the gains matter: k1, k2 and the quadratic weight on
s are chosen to put the planar motion in 2:1 resonance with the swing,
which is what drains the swing energy.  The linear weight on s is not
free; it is calibrated so the shaped potential is stationary at the
target and the suite re-derives it.
"""

from __future__ import annotations

from ..expr import Bin, Domain, Neg, Num, differentiate, max_residual, parse, simplify
from ..idapbc import (
    MechanicalDesired,
    MechanicalSystem,
    calibrate_equilibrium,
    check_pde_rows,
    equilibrium_assignment_check,
    ke_matching_system,
    ke_pde_terms,
    mechanical_closed_loop_terms,
    pe_pde_terms,
)
from ..pfaffian import (
    CharacteristicSystem,
    FirstOrderPDE,
    characteristic_residuals,
    check_pde_solution,
    lemma1_check,
)
from ..reporting import ResidualReport, combine_reports
from .core import BenchmarkCase, SimScenario

K1 = 2.0
K2 = 0.0821
PARAMS = {
    "m": 1.0,
    "g": 9.81,
    "b": 1.0,
    "k0": 1.0,
    "k1": K1,
    "k2": K2,
    "cphi": 400.0,
    "cx": 4.0,
    "kv": 0.5,
    "cs": 9.81 / (2.0 * K1 * K2),
}

L1 = "sqrt(x^2 + y^2 + z^2)"
L2 = "sqrt((x-b)^2 + y^2 + z^2)"
S_ARG = "k2*y^2 + k1*z^2"
V_D_NONHOM = "m^2*g/k1*(y + 1)"
V_D_HOM = (
    f"cx*0.5*(x - 0.5)^2 + cphi*0.5*({S_ARG} - k2)^2 + cs*({S_ARG} - k2)"
)
MD22 = "y^2/2 + k1"
MD33 = "z^2/2 + k2"
MD23 = "y*z/2"
ALPHAS = [
    ("0", "0", "0"),
    ("0", "0", "0"),
    ("0", "-k1*z/(2*m)", "k2*y/(2*m)"),
]
Q_STAR = (0.5, -1.0, 0.0)


def build() -> BenchmarkCase:
    domain = Domain(
        {
            "x": (0.0, 1.0),
            "y": (-2.0, -0.3),
            "z": (-0.5, 0.5),
            "px": (-8.0, 8.0),
            "py": (-8.0, 8.0),
            "pz": (-8.0, 8.0),
        },
        params=PARAMS,
    )
    mech = MechanicalSystem(
        ("x", "y", "z"),
        ("px", "py", "pz"),
        M=[["m", "0", "0"], ["0", "m", "0"], ["0", "0", "m"]],
        V=parse("m*g*y"),
        G=[
            [f"x/({L1})", f"(x-b)/({L2})"],
            [f"y/({L1})", f"y/({L2})"],
            [f"z/({L1})", f"z/({L2})"],
        ],
        G_perp=[["0", "-b*z", "b*y"]],
        domain=domain,
    )
    desired = MechanicalDesired(
        M_d=[["k0", "0", "0"], ["0", MD22, MD23], ["0", MD23, MD33]],
        V_d=parse(f"{V_D_NONHOM} + {V_D_HOM}"),
        alphas=ALPHAS,
        K_v=[["kv", "0"], ["0", "kv"]],
        q_star={"x": Q_STAR[0], "y": Q_STAR[1], "z": Q_STAR[2]},
        momentum="shaped",
    )
    return BenchmarkCase(
        name="cdr_spatial",
        title="Cable-suspended mass with out-of-plane swing",
        kind="mechanical",
        model=mech,
        desired=desired,
        solutions={
            "mass_coupling_entry": parse(MD23),
            "potential_nonhom": parse(V_D_NONHOM),
            "potential_argument": parse(S_ARG),
        },
        x_star={
            "x": Q_STAR[0], "y": Q_STAR[1], "z": Q_STAR[2],
            "px": 0.0, "py": 0.0, "pz": 0.0,
        },
        params=PARAMS,
        free_params=("cs",),
        sim=SimScenario(
            x0=(0.55, -0.95, 0.05, 0.0, 0.0, 0.0),
            dt=1e-3,
            t_final=20.0,
            q_star=Q_STAR,
        ),
        coverage={
            "open-loop structure": "structure",
            "component matching system": "ke-component-system / ke-pde",
            "coupling-entry chain": "md23-chain / md23-chain-leg-halved / md23-doubled-variant",
            "potential chain": "pe-split / first-integral checks",
            "potential solution": "pe-pde / equilibrium assignment",
            "linear weight on s": "calibrated-linear-weight",
        },
        notes=(
            "Defaults k1 = k2 = 1 leave the swing without any damping path; "
            "the shipped gains put the actuated plane in 2:1 resonance with "
            "the swing so the coupling extracts its energy."
        ),
    )


def _chain_R(md23_sym="Md23"):
    """The coupling-entry chain's last leg, with the block entries inserted."""
    m22, m33 = parse(MD22), parse(MD33)
    d22y, d22z = differentiate(m22, "y"), differentiate(m22, "z")
    d33y, d33z = differentiate(m33, "y"), differentiate(m33, "z")
    lin = parse("y/2") * d33z + parse("z^2/(2*y)") * d22z \
        - parse("y^2/(2*z)") * d33y - parse("z/2") * d22y
    free = (
        parse("y/(2*z)") * (Neg(parse("z") * m22) * d33y + parse("y") * m33 * d33z)
        + parse("z/(2*y)") * (Neg(parse("z") * m22) * d22y + parse("y") * m33 * d22z)
    )
    return simplify(Bin("+", Neg(Bin("*", lin, parse(md23_sym))), free))


def checks(case: BenchmarkCase, n, tol, seed):
    mech, des, dom = case.model, case.desired, case.domain
    reports = list(mech.structure_reports(n=n, tol=tol, seed=seed))

    # all six component equations of the KE system with the derived alphas
    parts = []
    for (k, l), lhs, rhs in ke_matching_system(mech, des.M_d, alphas=ALPHAS):
        worst, raw = max_residual([lhs, Neg(rhs)], dom, n=n, seed=seed)
        parts.append(
            ResidualReport(f"component[{k + 1}{l + 1}]", n, worst, tol, seed, max_raw_residual=raw)
        )
    reports.append(combine_reports("ke-component-system", parts))
    reports.append(check_pde_rows(ke_pde_terms(mech, des), dom, tol=tol, seed=seed, n=n, name="ke-pde"))
    # the gyroscopic term only closes the KE-PDE when built on the shaped
    # momentum M_d^{-1}p; the stated open-loop momentum does not
    open_des = MechanicalDesired(
        M_d=des.M_d, V_d=des.V_d, alphas=ALPHAS, K_v=des.K_v, momentum="open"
    )
    rep = check_pde_rows(
        ke_pde_terms(mech, open_des), dom, tol=tol, seed=seed, n=n, name="ke-pde-open-momentum-variant"
    )
    rep.note = "gyroscopic term quoted with M^{-1}p; the alphas solve the system only with M_d^{-1}p"
    reports.append(rep)

    # chain for the coupling entry; keep away from the y and z axes where
    # the raw leg expression has removable poles
    chain_dom = Domain(
        {"x": (0.0, 1.0), "y": (-2.0, -0.3), "z": (0.05, 0.5)},
        params=PARAMS,
    )
    chain = FirstOrderPDE(
        ("y", "z"),
        "Md23",
        (f"-z*({MD22}) + y*Md23", f"-z*Md23 + y*({MD33})"),
        _chain_R(),
        chain_dom,
    )
    reports.append(
        check_pde_solution(
            chain, case.solutions["mass_coupling_entry"], chain_dom,
            tol=tol, seed=seed, n=n, name="md23-chain",
        )
    )
    # the combined-denominator identity used to simplify the chain
    denom = [parse(f"-z^2*({MD22}) + y^2*({MD33})"), Neg(parse("k2*y^2 - k1*z^2"))]
    worst, raw = max_residual(denom, dom, n=n, seed=seed)
    reports.append(
        ResidualReport("combined-denominator identity", n, worst, tol, seed, max_raw_residual=raw)
    )
    # the printed last leg is twice the one the stated solution satisfies
    halved = [Bin("*", Num(2), _chain_R()), Neg(parse("k2*y^2 - k1*z^2"))]
    worst, raw = max_residual(halved, dom, n=n, seed=seed)
    reports.append(
        ResidualReport(
            "md23-chain-leg-halved", n, worst, tol, seed, max_raw_residual=raw,
            note="printed leg k2*y^2 - k1*z^2 is double the derived one",
        )
    )
    doubled = FirstOrderPDE(
        ("y", "z"),
        "Md23",
        (f"-z*({MD22}) + y*Md23", f"-z*Md23 + y*({MD33})"),
        "k2*y^2 - k1*z^2",
        chain_dom,
    )
    rep = check_pde_solution(
        doubled, case.solutions["mass_coupling_entry"], chain_dom,
        tol=tol, seed=seed, n=n, name="md23-doubled-variant",
    )
    rep.note = "the chain as printed; its stated solution y*z/2 misses it by a factor 2"
    reports.append(rep)

    # potential chain: first integrals, split solution, and the full row
    pe = FirstOrderPDE(
        ("x", "y", "z"), "Vd", ("0", "-k1*z", "k2*y"), "-m^2*g*z", dom
    )
    reports.extend(
        characteristic_residuals(
            CharacteristicSystem(pe),
            [parse("x"), case.solutions["potential_argument"]],
            domain=dom, tol=tol, seed=seed, n=n,
        )
    )
    reports.append(
        lemma1_check(
            pe,
            [
                parse("cx*0.5*(x - 0.5)^2"),
                parse(f"cphi*0.5*({S_ARG} - k2)^2"),
                parse(f"cs*({S_ARG} - k2)"),
            ],
            case.solutions["potential_nonhom"],
            domain=dom, tol=tol, seed=seed, n=n,
            name="pe-split",
        )
    )
    reports.append(check_pde_rows(pe_pde_terms(mech, des), dom, tol=tol, seed=seed, n=n, name="pe-pde"))

    # the linear weight on s is fixed by stationarity at the target
    H_d = des.desired_hamiltonian(mech)
    eq = equilibrium_assignment_check(H_d, case.x_star, PARAMS, tol=1e-8)
    reports.append(
        ResidualReport(
            "equilibrium-assignment",
            n,
            eq.grad_norm if eq.passed else max(eq.grad_norm, 1.0),
            1e-8,
            seed,
            note=f"verdict {eq.verdict}; eigenvalues {', '.join(f'{e:.3g}' for e in eq.eigenvalues)}",
        )
    )
    bound, _ = calibrate_equilibrium(H_d, ("cs",), case.x_star, PARAMS)
    expected = PARAMS["m"] ** 2 * PARAMS["g"] / (2 * PARAMS["k1"] * PARAMS["k2"])
    err = abs(bound["cs"] - expected) / abs(expected)
    reports.append(
        ResidualReport(
            "calibrated-linear-weight", n, err, 1e-6, seed,
            note=f"cs = {bound['cs']:.6f}, stationarity requires m^2*g/(2*k1*k2) = {expected:.6f}",
        )
    )

    reports.append(
        check_pde_rows(
            mechanical_closed_loop_terms(mech, des), dom, tol=tol, seed=seed, n=n, name="closed-loop"
        )
    )
    return reports
