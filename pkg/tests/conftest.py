"""Shared fixtures: the benchmark expression corpus and cached suite runs."""

from pathlib import Path

import pytest

from pfida.benchmarks import case_names, load_case, verify_case

REPO = Path(__file__).resolve().parent.parent

# Every failing check in a shipped suite is a documented printed-formula
# discrepancy; the red set is pinned so regressions in either direction show.
EXPECTED_FAILURES = {
    "cdr_planar": {"separable-argument-printed-variant"},
    "cdr_spatial": {"ke-pde-open-momentum-variant", "md23-doubled-variant"},
    "food_chain": {
        "second-row printed variant",
        "matching-row-1",
        "matching-row-1-negated-coupling",
    },
    "maglev": {"nonhom-printed-variant"},
    "mems_switch": {"hom-momentum-variant"},
    "oscillator": set(),
    "pendubot": set(),
}


@pytest.fixture(scope="session")
def repo_root():
    return REPO


@pytest.fixture(scope="session")
def cases():
    """All registry cases, built once."""
    return {name: load_case(name) for name in case_names()}


@pytest.fixture(scope="session")
def suite_reports(cases):
    """Full verification suites, run once and shared across test modules."""
    return {name: verify_case(case) for name, case in cases.items()}


def expression_corpus(cases):
    """(label, expr, domain) triples covering every shipped closed form."""
    out = []
    for name, case in cases.items():
        dom = case.domain
        for key, expr in case.solutions.items():
            out.append((f"{name}:{key}", expr, dom))
        for variant in case.variants:
            out.append((f"{name}:variant:{variant.name}", variant.expr, dom))
        if case.kind == "pch":
            out.append((f"{name}:H", case.model.H, dom))
            if case.desired.H_a is not None:
                out.append((f"{name}:H_a", case.desired.H_a, dom))
        else:
            out.append((f"{name}:V", case.model.V, dom))
            out.append((f"{name}:V_d", case.desired.V_d, dom))
            out.append((f"{name}:H", case.model.hamiltonian(), dom))
    return out


@pytest.fixture(scope="session")
def corpus(cases):
    return expression_corpus(cases)
