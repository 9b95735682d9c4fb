"""Harmonic oscillator with damping injection.

The smallest closed loop in the registry.  Open loop it conserves its
energy exactly, which makes it the reference case for integrator
drift and order checks; closed loop the feedback only adds damping
through the input channel, so the matching equations hold with the
open-loop energy unchanged.
"""

from __future__ import annotations

from ..expr import Domain, parse
from ..idapbc import DesiredStructure, PCHSystem, check_matching, check_pde_rows, closed_loop_terms, control_law
from ..reporting import ResidualReport
from ..expr import max_residual
from .core import BenchmarkCase, SimScenario

PARAMS = {"k": 1.0, "m": 1.0, "kv": 0.4}


def build() -> BenchmarkCase:
    domain = Domain(
        {"x1": (-2.0, 2.0), "x2": (-2.0, 2.0)},
        params=PARAMS,
    )
    model = PCHSystem(
        ("x1", "x2"),
        J=[["0", "1"], ["-1", "0"]],
        R=[["0", "0"], ["0", "0"]],
        H=parse("0.5*k*x1^2 + x2^2/(2*m)"),
        g=[["0"], ["1"]],
        g_perp=[["1", "0"]],
        domain=domain,
    )
    desired = DesiredStructure(
        J_d=[["0", "1"], ["-1", "0"]],
        R_d=[["0", "0"], ["0", "kv"]],
        H_a=parse("0"),
        x_star={"x1": 0.0, "x2": 0.0},
    )
    return BenchmarkCase(
        name="oscillator",
        title="Harmonic oscillator with damping injection",
        kind="pch",
        model=model,
        desired=desired,
        solutions={},
        x_star=desired.x_star,
        params=PARAMS,
        sim=SimScenario(
            x0=(1.0, 0.0),
            dt=1e-3,
            t_final=10.0,
            q_star=(0.0, 0.0),
        ),
        coverage={
            "open-loop structure": "structure",
            "matching equations": "matching",
            "damping injection": "feedback-is-velocity-damping / closed-loop",
        },
        notes="Reference case for integrator conservation and order checks.",
    )


def checks(case: BenchmarkCase, n, tol, seed):
    model, des, dom = case.model, case.desired, case.domain
    reports = list(model.structure_reports(n=n, tol=tol, seed=seed))
    reports.append(check_matching(model, des, dom, tol=tol, seed=seed, n=n))
    u = control_law(model, des)
    worst, raw = max_residual([u[0], parse("kv*x2/m")], dom, n=n, seed=seed)
    reports.append(
        ResidualReport("feedback-is-velocity-damping", n, worst, tol, seed, max_raw_residual=raw)
    )
    reports.append(
        check_pde_rows(
            closed_loop_terms(model, des, u=u), dom, tol=tol, seed=seed, n=n, name="closed-loop"
        )
    )
    return reports
