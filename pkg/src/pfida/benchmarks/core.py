"""Benchmark case container and the shared check plumbing."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import DimensionError, PfidaError
from ..expr import eval_expr, gradient
from ..idapbc import MechanicalSystem
from ..linalg import vec_dot

DEFAULT_TOL = 1e-9
DEFAULT_POINTS = 200
DEFAULT_SEED = 42


@dataclass
class SimScenario:
    """Default closed-loop run for a case: start point and horizon.

    `q_star` is the target used for convergence metrics (positions only
    for mechanical systems).  `gated` marks a design whose shaped energy
    has no minimum at the target, so simulating it would be meaningless;
    the gate note explains why.
    """

    x0: tuple
    dt: float = 1e-3
    t_final: float = 20.0
    q_star: tuple = ()
    gated: bool = False
    gate_note: str = ""


@dataclass
class BenchmarkCase:
    """One worked system: model, target design, solutions, and metadata.

    `solutions` holds the named closed-form expressions the check suite
    verifies; `variants` holds printed/corrected pairs that are reported
    side by side.  `coverage` maps each published artifact of the source
    derivation to the check (or discrepancy note) that covers it.
    """

    name: str
    title: str
    kind: str  # "pch" | "mechanical"
    model: object
    desired: object
    solutions: dict = field(default_factory=dict)
    variants: list = field(default_factory=list)
    x_star: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    controller: list = None
    sim: SimScenario = None
    coverage: dict = field(default_factory=dict)
    free_params: tuple = ()
    notes: str = ""

    @property
    def domain(self):
        return self.model.domain

    def state_names(self):
        if self.kind == "mechanical":
            return tuple(self.model.q) + tuple(self.model.p)
        return tuple(self.model.states)


@dataclass
class Variant:
    """A printed formula and its status under the residual oracle."""

    name: str
    expr: object
    expect_pass: bool
    note: str = ""


def controller_expressions(case: BenchmarkCase):
    """Simplified feedback expressions for the case, derived on first use."""
    if case.controller is None:
        from ..idapbc import control_law, mechanical_control_law

        if case.kind == "mechanical":
            case.controller = mechanical_control_law(case.model, case.desired)
        else:
            case.controller = control_law(case.model, case.desired)
    return case.controller


def run_scenario(
    case: BenchmarkCase,
    x0=None,
    dt=None,
    t_final=None,
    open_loop=False,
    record_every=1,
):
    """Integrate the case's closed loop (or open loop) and return the run.

    Scenario fields fill in anything not given.  A gated scenario refuses
    the closed loop; the gate note says why.
    """
    from ..simulate import SimConfig, simulate

    sc = case.sim or SimScenario(x0=())
    if sc.gated and not open_loop:
        raise PfidaError(f"closed-loop run gated for {case.name}: {sc.gate_note}")
    x0 = tuple(x0 if x0 is not None else sc.x0)
    if not x0:
        raise PfidaError(f"case {case.name} has no default start point; pass x0")
    cfg = SimConfig(
        x0=x0,
        dt=dt if dt is not None else sc.dt,
        t_final=t_final if t_final is not None else sc.t_final,
        record_every=record_every,
    )
    controller = None if open_loop else controller_expressions(case)
    if case.kind == "mechanical":
        H_d = case.desired.desired_hamiltonian(case.model)
    else:
        H_d = case.desired.desired_hamiltonian(case.model.H)
    return simulate(case.model, controller, cfg, H_d=H_d)


def natural_equilibria_residual(mech, point: dict) -> float:
    """Value of the unforced-equilibrium condition G⊥∇_qV at a point.

    Zero means the configuration is an equilibrium of the open-loop
    dynamics without any input, i.e. potential shaping alone can target
    it.  Implemented for a single unactuated direction.
    """
    if not isinstance(mech, MechanicalSystem):
        raise DimensionError("natural equilibria are defined for mechanical systems")
    if len(mech.G_perp) != 1:
        raise DimensionError("implemented for one unactuated direction")
    expr = vec_dot(mech.G_perp[0], gradient(mech.V, mech.q))
    bindings = dict(mech.domain.params) if mech.domain else {}
    bindings.update(point)
    return eval_expr(expr, bindings)
