import pytest

from pfida.errors import CaseFormatError
from pfida.expr import equiv_numeric
from pfida.benchmarks import load_case, verify_case
from pfida.benchmarks.caseformat import export_case, parse_case_file


@pytest.mark.parametrize(
    "name", ["cdr_planar", "cdr_spatial", "food_chain", "maglev", "mems_switch", "oscillator", "pendubot"]
)
def test_export_parse_round_trip(name, cases, tmp_path):
    case = cases[name]
    path = tmp_path / f"{name}.case"
    export_case(case, path)
    back = parse_case_file(str(path))
    assert back.name == case.name
    assert back.kind == case.kind
    assert back.state_names() == case.state_names()
    assert back.x_star == pytest.approx(case.x_star)
    assert back.params == pytest.approx(case.params)
    assert set(back.solutions) == set(case.solutions)
    assert back.domain.box == case.domain.box
    dom = case.domain
    if case.kind == "pch":
        assert equiv_numeric(back.model.H, case.model.H, dom)
    else:
        assert equiv_numeric(back.model.V, case.model.V, dom)
        assert equiv_numeric(back.desired.V_d, case.desired.V_d, dom)


def test_shipped_case_files_parse(repo_root):
    for path in sorted((repo_root / "cases").glob("*.case")):
        case = parse_case_file(str(path))
        assert case.state_names()


def test_load_case_accepts_file_path(repo_root):
    case = load_case(str(repo_root / "cases" / "oscillator.case"))
    assert case.kind == "pch"


def test_parsed_registry_name_gets_registry_suite(repo_root):
    # a file whose name matches a shipped case runs that case's full suite
    case = load_case(str(repo_root / "cases" / "oscillator.case"))
    reports = verify_case(case, n=60)
    assert all(r.passed for r in reports)
    assert "feedback-is-velocity-damping" in {r.name for r in reports}


MINIMAL = """\
[case]
name = tiny
kind = pch

[system]
states = x1, x2
J = [[0, 1], [-1, 0]]
R = [[0, 0], [0, 0]]
H = 0.5*x1^2 + 0.5*x2^2
g = [[0], [1]]
g_perp = [[1, 0]]

[desired]
J_d = [[0, 1], [-1, 0]]
R_d = [[0, 0], [0, kv]]
H_a = 0

[domain]
x1 = (-1, 1)
x2 = (-1, 1)

[equilibrium]
x1 = 0
x2 = 0

[params]
kv = 0.5
"""


def test_minimal_file_parses_and_verifies(tmp_path):
    path = tmp_path / "tiny.case"
    path.write_text(MINIMAL)
    case = parse_case_file(str(path))
    assert case.name == "tiny"
    reports = verify_case(case, n=40)
    assert all(r.passed for r in reports)


@pytest.mark.parametrize(
    "mangle, needle",
    [
        (lambda t: t.replace("[system]", "[nonsense]"), "unknown section"),
        (lambda t: "stray = 1\n" + t, "before any section"),
        (lambda t: t.replace("kv = 0.5", "kv 0.5"), "name = value"),
        (lambda t: t.replace("[[0], [1]]", "[0, 1]"), "matrix"),
        (lambda t: t.replace("(-1, 1)", "-1, 1", 1), "interval"),
        (lambda t: t.replace("kind = pch", "kind = hybrid"), "kind"),
        (lambda t: t.replace("g_perp = [[1, 0]]\n", ""), "g_perp"),
        (lambda t: t + "\n[domain]\nexclude = x1 > 0\n", "exclude"),
        (lambda t: t.replace("kv = 0.5", "kv = fast"), "number"),
        (lambda t: t.replace("x1 = 0\nx2 = 0", "x1 = north\nx2 = 0"), "number"),
    ],
)
def test_parse_errors(tmp_path, mangle, needle):
    path = tmp_path / "bad.case"
    path.write_text(mangle(MINIMAL))
    with pytest.raises(CaseFormatError, match=needle):
        parse_case_file(str(path))
