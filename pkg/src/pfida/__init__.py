"""Verification-first toolkit for matching-PDE controller design.

Symbolic expressions, Pfaffian-form reduction, interconnection and
damping assignment checks, closed-loop simulation, and a registry of
worked benchmark systems, all backed by seeded numeric residual oracles.
"""

from .errors import PfidaError
from .expr import Domain, differentiate, eval_expr, parse, simplify, to_str
from .pfaffian import (
    FirstOrderPDE,
    PfaffianForm,
    SolutionTrace,
    SolveOptions,
    check_pde_solution,
    five_stage_solve,
    integrability_residual,
    is_integrable,
    load_form,
)
from .idapbc import (
    DesiredStructure,
    MechanicalDesired,
    MechanicalSystem,
    PCHSystem,
    calibrate_equilibrium,
    check_matching,
    control_law,
    equilibrium_assignment_check,
    mechanical_control_law,
)
from .reporting import Report, ResidualReport
from .simulate import SimConfig, Trajectory, convergence_metric, energy_monotone, simulate, write_csv
from .benchmarks import case_names, load_case, verify_case

__version__ = "0.1.0"

__all__ = [
    "DesiredStructure",
    "Domain",
    "FirstOrderPDE",
    "MechanicalDesired",
    "MechanicalSystem",
    "PCHSystem",
    "PfaffianForm",
    "PfidaError",
    "Report",
    "ResidualReport",
    "SimConfig",
    "SolutionTrace",
    "SolveOptions",
    "Trajectory",
    "calibrate_equilibrium",
    "case_names",
    "check_matching",
    "check_pde_solution",
    "control_law",
    "convergence_metric",
    "differentiate",
    "energy_monotone",
    "equilibrium_assignment_check",
    "eval_expr",
    "five_stage_solve",
    "integrability_residual",
    "is_integrable",
    "load_case",
    "load_form",
    "mechanical_control_law",
    "parse",
    "simplify",
    "simulate",
    "to_str",
    "verify_case",
    "write_csv",
]
