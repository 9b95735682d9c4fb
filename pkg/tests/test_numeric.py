import pytest

from pfida.errors import SamplingError
from pfida.expr import (
    Domain,
    default_domain_for,
    equiv_numeric,
    is_zero,
    max_residual,
    parse,
    sample_points,
)


def test_sample_points_deterministic():
    dom = Domain({"x": (0.0, 1.0), "y": (-1.0, 1.0)})
    a = sample_points(dom, 50, seed=42)
    b = sample_points(dom, 50, seed=42)
    assert a == b
    c = sample_points(dom, 50, seed=43)
    assert a != c


def test_sample_points_respect_box_and_params():
    dom = Domain({"x": (2.0, 3.0)}, params={"k": 5.0})
    for p in sample_points(dom, 20, seed=1):
        assert 2.0 <= p["x"] <= 3.0
        assert p["k"] == 5.0


def test_exclusions_keep_margin():
    dom = Domain({"x": (-1.0, 1.0)}, exclusions=(parse("x"),))
    margin = dom.margin()
    for p in sample_points(dom, 100, seed=2):
        assert abs(p["x"]) > margin


def test_impossible_exclusion_raises():
    dom = Domain({"x": (0.0, 1.0)}, exclusions=(parse("0"),))
    with pytest.raises(SamplingError):
        sample_points(dom, 5, seed=0)


def test_contains():
    dom = Domain({"x": (0.0, 1.0)}, exclusions=(parse("x - 0.5"),))
    assert dom.contains({"x": 0.2})
    assert not dom.contains({"x": 1.5})
    assert not dom.contains({"x": 0.5})


def test_max_residual_measures_cancellation():
    dom = Domain({"x": (0.5, 1.5)})
    worst, raw = max_residual([parse("x^2"), parse("-(x^2)")], dom, n=50)
    assert worst == 0.0 and raw == 0.0
    worst, raw = max_residual([parse("x"), parse("-x + 1e-6")], dom, n=50)
    assert worst == pytest.approx(1e-6, rel=0.6)
    assert raw == pytest.approx(1e-6, abs=1e-12)


def test_max_residual_scale_guards_large_terms():
    # two huge nearly-cancelling terms: scaled residual is small, raw is not
    dom = Domain({"x": (0.5, 1.5)})
    worst, raw = max_residual([parse("1e12*x"), parse("-1e12*x + 1")], dom, n=20)
    assert raw == pytest.approx(1.0, abs=1e-3)
    assert worst < 1e-11


def test_is_zero():
    dom = Domain({"x": (0.5, 1.5)})
    assert is_zero(parse("x - x"), dom)
    assert is_zero(parse("sin(x)^2 + cos(x)^2 - 1"), dom)
    assert not is_zero(parse("x - 1"), dom)


def test_equiv_numeric():
    dom = Domain({"x": (0.5, 1.5)})
    assert equiv_numeric(parse("(x + 1)^2"), parse("x^2 + 2*x + 1"), dom)
    assert not equiv_numeric(parse("x"), parse("x + 1e-3"), dom)


def test_default_domain_for():
    dom = default_domain_for([parse("a*x + pi")])
    assert set(dom.box) == {"a", "x"}


def test_with_params_overrides():
    dom = Domain({"x": (0.0, 1.0)}, params={"k": 1.0})
    d2 = dom.with_params(k=2.0, extra=3.0)
    assert d2.params == {"k": 2.0, "extra": 3.0}
    assert dom.params == {"k": 1.0}
