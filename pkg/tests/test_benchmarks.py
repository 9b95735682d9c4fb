import re

import pytest

from pfida.errors import DimensionError, PfidaError, UnknownCaseError
from pfida.benchmarks import (
    case_names,
    controller_expressions,
    load_case,
    natural_equilibria_residual,
    run_scenario,
)

from conftest import EXPECTED_FAILURES


def test_registry_lists_all_cases():
    assert case_names() == sorted(EXPECTED_FAILURES)


def test_unknown_case():
    with pytest.raises(UnknownCaseError):
        load_case("nosuch")


@pytest.mark.parametrize("name", sorted(EXPECTED_FAILURES))
def test_suite_failures_are_exactly_the_documented_ones(name, suite_reports):
    failing = {r.name for r in suite_reports[name] if not r.passed}
    assert failing == EXPECTED_FAILURES[name]


@pytest.mark.parametrize("name", sorted(EXPECTED_FAILURES))
def test_reports_carry_sampling_metadata(name, suite_reports):
    for r in suite_reports[name]:
        assert r.n_points > 0
        assert r.tolerance >= 0  # rank-style checks report a zero tolerance
        assert r.seed is not None


def _normalize(s):
    return s.lower().replace(" ", "-")


def _check_stems(report_names):
    stems = set()
    for name in report_names:
        n = _normalize(name)
        stems.add(n)
        stems.add(n.split("[")[0])
        stems.add(n.split("-equals")[0])
        stems.add(re.sub(r"-\d+$", "", n))
    return {s for s in stems if len(s) >= 4}


@pytest.mark.parametrize("name", sorted(EXPECTED_FAILURES))
def test_coverage_manifest_resolves_to_checks(name, cases, suite_reports):
    case = cases[name]
    assert case.coverage, "every case documents what its checks cover"
    produced = [r.name for r in suite_reports[name]]
    stems = _check_stems(produced)
    structural = {"j-skew", "m-symmetric"}
    for artifact, target in case.coverage.items():
        for token in (_normalize(t.strip()) for t in target.split("/")):
            if token == "structure":
                assert structural & {_normalize(n) for n in produced}
                continue
            ok = any(token == s or token.startswith(s) or s.startswith(token) for s in stems)
            assert ok, f"{name}: {artifact!r} points at {token!r} but no check matches"


@pytest.mark.parametrize("name", sorted(EXPECTED_FAILURES))
def test_solutions_nonempty_and_parseable(name, cases):
    case = cases[name]
    if name == "oscillator":
        return  # reference case for the integrator; nothing closed-form to pin
    assert case.solutions


def test_natural_equilibria_planar(cases):
    mech = cases["cdr_planar"].model
    params = mech.domain.params
    a, b, g = params["a"], params["b"], params["g"]
    got = natural_equilibria_residual(mech, {"x": 0.3, "y": -1.0, "th": 0.0})
    # at zero angle the unforced condition reduces to g*a*y*(b - 2x)
    assert got == pytest.approx(g * a * -1.0 * (b - 2 * 0.3))
    assert natural_equilibria_residual(mech, {"x": b / 2, "y": -1.0, "th": 0.0}) == 0.0
    assert natural_equilibria_residual(mech, {"x": 0.3, "y": 0.0, "th": 0.0}) == 0.0


def test_natural_equilibria_spatial(cases):
    mech = cases["cdr_spatial"].model
    target = {k: cases["cdr_spatial"].x_star[k] for k in mech.q}
    assert natural_equilibria_residual(mech, target) == pytest.approx(0.0, abs=1e-12)
    assert abs(natural_equilibria_residual(mech, {"x": 0.3, "y": -0.5, "z": 0.4})) > 1.0


def test_natural_equilibria_needs_mechanical(cases):
    with pytest.raises(DimensionError):
        natural_equilibria_residual(cases["food_chain"].model, {})


def test_controller_expressions_cached(cases):
    case = load_case("oscillator")
    u1 = controller_expressions(case)
    u2 = controller_expressions(case)
    assert u1 is u2
    assert len(u1) == len(case.model.g[0])


def test_pendubot_closed_loop_gated(cases):
    case = cases["pendubot"]
    assert case.sim.gated
    with pytest.raises(PfidaError, match="gated"):
        run_scenario(case)


def test_run_scenario_open_loop_short(cases):
    traj = run_scenario(load_case("oscillator"), open_loop=True, t_final=0.5)
    assert max(abs(h - traj.H[0]) for h in traj.H) <= 1e-10
