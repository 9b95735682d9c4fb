"""Registry of worked benchmark systems and their verification suites."""

from __future__ import annotations

import os

from ..errors import UnknownCaseError
from .core import (
    DEFAULT_POINTS,
    DEFAULT_SEED,
    DEFAULT_TOL,
    BenchmarkCase,
    SimScenario,
    Variant,
    controller_expressions,
    natural_equilibria_residual,
    run_scenario,
)

from . import cdr_planar as _cdr_planar
from . import cdr_spatial as _cdr_spatial
from . import food_chain as _food_chain
from . import maglev as _maglev
from . import mems as _mems
from . import oscillator as _oscillator
from . import pendubot as _pendubot

_REGISTRY = {
    "cdr_planar": _cdr_planar,
    "cdr_spatial": _cdr_spatial,
    "food_chain": _food_chain,
    "maglev": _maglev,
    "mems_switch": _mems,
    "oscillator": _oscillator,
    "pendubot": _pendubot,
}


def case_names():
    return sorted(_REGISTRY)


def load_case(name: str) -> BenchmarkCase:
    """Build a fully bound case by registry name, or parse a case file path."""
    if name in _REGISTRY:
        return _REGISTRY[name].build()
    if os.path.sep in name or name.endswith(".case") or os.path.exists(name):
        from .caseformat import parse_case_file

        return parse_case_file(name)
    raise UnknownCaseError(
        f"unknown case {name!r}; expected one of {', '.join(case_names())} or a case file path"
    )


def verify_case(
    case: BenchmarkCase,
    tol: float = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
    n: int = DEFAULT_POINTS,
):
    """Run the case's full check suite; failing checks are reported, not raised."""
    module = _REGISTRY.get(case.name)
    if module is None or not hasattr(module, "checks"):
        from .caseformat import generic_checks

        return generic_checks(case, n=n, tol=tol, seed=seed)
    return module.checks(case, n=n, tol=tol, seed=seed)


__all__ = [
    "BenchmarkCase",
    "SimScenario",
    "Variant",
    "case_names",
    "controller_expressions",
    "load_case",
    "natural_equilibria_residual",
    "run_scenario",
    "verify_case",
]
