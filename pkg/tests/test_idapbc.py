import pytest

from pfida.errors import DimensionError, NotAffineError, SingularInputError
from pfida.expr import Domain, Sym, eval_expr, parse, simplify
from pfida.idapbc import (
    DesiredStructure,
    MechanicalDesired,
    MechanicalSystem,
    PCHSystem,
    build_j2,
    calibrate_equilibrium,
    check_matching,
    check_pde_rows,
    closed_loop_terms,
    control_law,
    equilibrium_assignment_check,
    ke_matching_system,
    ke_pde_terms,
    matching_residual,
    mechanical_closed_loop_terms,
    mechanical_control_law,
    pe_pde_terms,
    to_characteristics,
)

DOM2 = Domain({"x1": (-1.0, 1.0), "x2": (-1.0, 1.0)}, params={"kv": 0.5})


def damped_oscillator():
    model = PCHSystem(
        ("x1", "x2"),
        J=[["0", "1"], ["-1", "0"]],
        R=[["0", "0"], ["0", "0"]],
        H=parse("0.5*x1^2 + 0.5*x2^2"),
        g=[["0"], ["1"]],
        g_perp=[["1", "0"]],
        domain=DOM2,
    )
    des = DesiredStructure(
        J_d=[["0", "1"], ["-1", "0"]],
        R_d=[["0", "0"], ["0", "kv"]],
        H_a=parse("0"),
    )
    return model, des


def test_pch_structure_reports():
    model, _ = damped_oscillator()
    reports = model.structure_reports()
    assert all(r.passed for r in reports)
    names = {r.name for r in reports}
    assert {"J skew", "R symmetric", "g_perp annihilates g", "R PSD", "g_perp full rank"} <= names


def test_pch_dimension_errors():
    with pytest.raises(DimensionError):
        PCHSystem(("x1",), J=[["0"], ["0"]], R=[["0"]], H="0", g=[["1"]], g_perp=[])
    with pytest.raises(DimensionError):
        PCHSystem(
            ("x1", "x2"),
            J=[["0", "1"], ["-1", "0"]],
            R=[["0", "0"], ["0", "0"]],
            H="0",
            g=[["0"], ["1"]],
            g_perp=[["1", "0"], ["0", "1"]],  # too many rows
        )


def test_desired_structure_requires_energy():
    with pytest.raises(DimensionError):
        DesiredStructure(J_d=[["0"]], R_d=[["0"]])


def test_matching_residual_zero():
    model, des = damped_oscillator()
    res = matching_residual(model, des)
    # the unactuated row of velocity damping matches identically
    assert all(simplify(r) == parse("0") for r in res)
    assert check_matching(model, des, DOM2).passed


def test_control_law_is_velocity_damping():
    model, des = damped_oscillator()
    u = control_law(model, des)
    assert len(u) == 1
    point = {"x1": 0.3, "x2": -0.8, "kv": 0.5}
    assert eval_expr(u[0], point) == pytest.approx(-0.5 * -0.8)


def test_closed_loop_identity():
    model, des = damped_oscillator()
    rep = check_pde_rows(closed_loop_terms(model, des), DOM2, name="closed-loop")
    assert rep.passed


def test_singular_input_guard():
    model, des = damped_oscillator()
    model.g = [[parse("0")], [parse("0")]]  # identically degenerate input map
    with pytest.raises(SingularInputError):
        control_law(model, des)


MDOM = Domain({"q1": (-1.0, 1.0), "q2": (-1.0, 1.0), "p1": (-1.0, 1.0), "p2": (-1.0, 1.0)})


def cart_pair(v_d="q1^2/2 + q2^2", m_d=None):
    mech = MechanicalSystem(
        ("q1", "q2"),
        ("p1", "p2"),
        M=[["1", "0"], ["0", "1"]],
        V=parse("q1^2/2"),
        G=[["0"], ["1"]],
        G_perp=[["1", "0"]],
        domain=MDOM,
    )
    des = MechanicalDesired(
        M_d=m_d or [["1", "0"], ["0", "1"]],
        V_d=parse(v_d),
        K_v=[["1"]],
    )
    return mech, des


def test_mechanical_structure_reports():
    mech, _ = cart_pair()
    assert all(r.passed for r in mech.structure_reports())


def test_mechanical_pdes_and_closed_loop():
    mech, des = cart_pair()
    assert check_pde_rows(ke_pde_terms(mech, des), MDOM, name="ke").passed
    assert check_pde_rows(pe_pde_terms(mech, des), MDOM, name="pe").passed
    assert check_pde_rows(mechanical_closed_loop_terms(mech, des), MDOM, name="cl").passed


def test_pe_pde_detects_unactuated_mismatch():
    mech, des = cart_pair(v_d="q1^2")  # doubles the unactuated gradient
    assert not check_pde_rows(pe_pde_terms(mech, des), MDOM, name="pe").passed


def test_mechanical_control_law_dimension():
    mech, des = cart_pair()
    tau = mechanical_control_law(mech, des)
    assert len(tau) == 1
    # actuated shaping slope plus damping injection
    point = {"q1": 0.2, "q2": 0.4, "p1": 0.1, "p2": -0.3}
    assert eval_expr(tau[0], point) == pytest.approx(-2 * 0.4 - 1.0 * -0.3)


def test_build_j2_skew():
    from pfida.linalg import as_vector

    p = [Sym("p1"), Sym("p2"), Sym("p3")]
    alphas = [as_vector(a) for a in (["1", "0", "0"], ["0", "1", "0"], ["0", "0", "1"])]
    J2 = build_j2(alphas, p)
    point = {"p1": 0.3, "p2": 0.5, "p3": -0.2}
    for i in range(3):
        for j in range(3):
            a = eval_expr(J2[i][j], point)
            b = eval_expr(J2[j][i], point)
            assert a == -b
    with pytest.raises(DimensionError):
        build_j2(alphas[:2], p)


def test_ke_matching_system_symbolic_count():
    mech, _ = cart_pair()
    eqs = ke_matching_system(mech, [["md11", "md12"], ["md12", "md22"]])
    # upper triangle of a 2x2: (0,0), (0,1), (1,1)
    assert [idx for idx, _, _ in eqs] == [(0, 0), (0, 1), (1, 1)]


def test_to_characteristics_round_trip():
    pde = to_characteristics(
        parse("g1*x + g2*2 - (x + y)"), ("x", "y"), "u", ("g1", "g2")
    )
    assert pde.indep_vars == ("x", "y")
    assert simplify(pde.P[0]) == parse("x")
    assert simplify(pde.P[1]) == parse("2")
    assert simplify(pde.R) == simplify(parse("x + y"))


def test_to_characteristics_rejects_nonaffine():
    with pytest.raises(NotAffineError):
        to_characteristics(parse("g1*g2 - x"), ("x", "y"), "u", ("g1", "g2"))
    with pytest.raises(DimensionError):
        to_characteristics(parse("g1 - x"), ("x", "y"), "u", ("g1",))


def test_equilibrium_assignment_verdicts():
    quad = parse("(x - 1)^2 + (y - 2)^2")
    rep = equilibrium_assignment_check(quad, {"x": 1.0, "y": 2.0})
    assert rep.verdict == "minimum" and rep.passed
    saddle = equilibrium_assignment_check(parse("x^2 - y^2"), {"x": 0.0, "y": 0.0})
    assert saddle.verdict == "stationary-only" and not saddle.passed
    off = equilibrium_assignment_check(quad, {"x": 0.0, "y": 0.0})
    assert off.verdict == "not-stationary"


def test_calibrate_equilibrium_linear_weight():
    # gradient at x* = 2 is (x - 1) + ks, so stationarity forces ks = -1
    H_d = parse("0.5*(x - 1)^2 + ks*x")
    bound, report = calibrate_equilibrium(H_d, ("ks",), {"x": 2.0}, {"ks": 0.0})
    assert bound["ks"] == pytest.approx(-1.0, abs=1e-9)
    assert report.verdict == "minimum"
