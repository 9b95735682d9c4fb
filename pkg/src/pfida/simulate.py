"""Deterministic fixed-step integration of open- and closed-loop dynamics.

Systems integrate under x' = (J - R) grad H + g u, with mechanical systems
lowered to 2n first-order states.  RK4 with a fixed step keeps runs bitwise
reproducible and makes the order of accuracy directly checkable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainEscapeError, NonFiniteError, PfidaError
from .expr import Expr, Num, compile_expr, substitute
from .idapbc import MechanicalSystem, PCHSystem

__all__ = [
    "SimConfig",
    "Trajectory",
    "simulate",
    "energy_monotone",
    "convergence_metric",
    "write_csv",
]


@dataclass(frozen=True)
class SimConfig:
    """Run parameters for one simulation."""

    x0: tuple
    dt: float = 1e-3
    t_final: float = 10.0
    method: str = "rk4"
    record_every: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise PfidaError("dt must be positive")
        if self.t_final < self.dt:
            raise PfidaError("t_final must be at least one step")
        if self.record_every < 1:
            raise PfidaError("record_every must be a positive integer")
        if self.method != "rk4":
            raise PfidaError(f"unsupported integration method {self.method!r}")


@dataclass
class Trajectory:
    """Recorded rows of one run: times, states, inputs, and both energies."""

    state_names: tuple
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    inputs: list = field(default_factory=list)
    H: list = field(default_factory=list)
    Hd: list = field(default_factory=list)
    hd_fn: object = field(default=None, compare=False, repr=False)

    def append(self, t, x, u, h, hd):
        self.times.append(t)
        self.states.append(tuple(x))
        self.inputs.append(tuple(u))
        self.H.append(h)
        self.Hd.append(hd)

    def __len__(self):
        return len(self.times)


def _bind_params(e: Expr, params: dict) -> Expr:
    if not params:
        return e
    return substitute(e, {k: Num(float(v)) for k, v in params.items()})


def _compile_all(exprs, names, params):
    return [compile_expr(_bind_params(e, params), names) for e in exprs]


def _lowered(sys):
    """Return (state names, drift exprs, input column exprs, H expr)."""
    if isinstance(sys, MechanicalSystem):
        from .expr import differentiate

        names = tuple(sys.q) + tuple(sys.p)
        H = sys.hamiltonian()
        drift = [differentiate(H, pi) for pi in sys.p]
        drift += [Num(0) - differentiate(H, qi) for qi in sys.q]
        n, m = len(sys.q), len(sys.G[0])
        g_cols = [[Num(0)] * n + [sys.G[i][j] for i in range(n)] for j in range(m)]
        return names, drift, g_cols, H
    if isinstance(sys, PCHSystem):
        names = tuple(sys.states)
        drift = sys.drift_field()
        m = len(sys.g[0])
        g_cols = [[sys.g[i][j] for i in range(len(names))] for j in range(m)]
        return names, drift, g_cols, sys.H
    raise PfidaError(f"cannot simulate object of type {type(sys).__name__}")


def simulate(sys, controller, cfg: SimConfig, H_d: Expr | None = None) -> Trajectory:
    """Integrate `sys` under the feedback `controller` (None for open loop).

    The drift, input columns, feedback, and both energies are compiled to
    plain closures once, before the loop.  If the state leaves the system's
    declared domain the run stops with DomainEscape carrying the rows
    recorded so far; a non-finite state raises NonFinite the same way.
    """
    names, drift_exprs, g_cols, H = _lowered(sys)
    if len(cfg.x0) != len(names):
        raise PfidaError(f"x0 has {len(cfg.x0)} entries, expected {len(names)}")
    params = sys.domain.params
    drift = _compile_all(drift_exprs, names, params)
    g_fns = [_compile_all(col, names, params) for col in g_cols]
    m = len(g_fns)
    u_fns = _compile_all(controller, names, params) if controller is not None else None
    if u_fns is not None and len(u_fns) != m:
        raise PfidaError(f"controller has {len(u_fns)} entries, expected {m}")
    h_fn = compile_expr(_bind_params(H, params), names)
    hd_fn = compile_expr(_bind_params(H_d, params), names) if H_d is not None else h_fn

    def control(x):
        if u_fns is None:
            return (0.0,) * m
        return tuple(f(*x) for f in u_fns)

    def rhs(x):
        u = control(x)
        out = []
        for i, f in enumerate(drift):
            v = f(*x)
            for j in range(m):
                uj = u[j]
                if uj != 0.0:
                    v += g_fns[j][i](*x) * uj
            out.append(v)
        return out

    traj = Trajectory(state_names=names, hd_fn=hd_fn)
    x = tuple(float(v) for v in cfg.x0)
    if not _in_domain(sys, names, x):
        raise PfidaError("x0 is outside the declared domain")
    traj.append(0.0, x, control(x), h_fn(*x), hd_fn(*x))

    n_steps = int(round(cfg.t_final / cfg.dt))
    dt = cfg.dt
    for k in range(1, n_steps + 1):
        try:
            x = _rk4_step(rhs, x, dt)
        except (ValueError, ZeroDivisionError, OverflowError) as exc:
            raise NonFiniteError(
                f"integration failed at t = {k * dt:.6g}: {exc}",
                time=(k - 1) * dt,
                partial=traj,
            ) from exc
        t = k * dt
        if not all(math.isfinite(v) for v in x):
            raise NonFiniteError(
                f"non-finite state at t = {t:.6g}", time=t, partial=traj
            )
        if not _in_domain(sys, names, x):
            raise DomainEscapeError(
                f"state left the declared domain at t = {t:.6g}",
                time=t,
                partial=traj,
            )
        if k % cfg.record_every == 0 or k == n_steps:
            try:
                traj.append(t, x, control(x), h_fn(*x), hd_fn(*x))
            except (ValueError, ZeroDivisionError, OverflowError) as exc:
                raise NonFiniteError(
                    f"output evaluation failed at t = {t:.6g}: {exc}",
                    time=t,
                    partial=traj,
                ) from exc
    return traj


def _rk4_step(rhs, x, dt):
    k1 = rhs(x)
    k2 = rhs(tuple(xi + 0.5 * dt * ki for xi, ki in zip(x, k1)))
    k3 = rhs(tuple(xi + 0.5 * dt * ki for xi, ki in zip(x, k2)))
    k4 = rhs(tuple(xi + dt * ki for xi, ki in zip(x, k3)))
    return tuple(
        xi + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
        for xi, a, b, c, d in zip(x, k1, k2, k3, k4)
    )


def _in_domain(sys, names, x) -> bool:
    box = sys.domain.box
    bindings = dict(zip(names, x))
    for name, v in bindings.items():
        if name in box:
            lo, hi = box[name]
            if not (lo <= v <= hi):
                return False
    margin = sys.domain.margin()
    full = {**sys.domain.params, **bindings}
    from .expr import eval_expr

    for excl in sys.domain.exclusions:
        try:
            if abs(eval_expr(excl, full)) <= margin:
                return False
        except PfidaError:
            return False
    return True


def energy_monotone(traj: Trajectory, slack: float = 1e-8):
    """Check Hd never rises by more than `slack` per recorded step.

    Returns (ok, worst violation); the violation is 0.0 for a clean run.
    """
    worst = 0.0
    for prev, cur in zip(traj.Hd, traj.Hd[1:]):
        worst = max(worst, cur - prev)
    return worst <= slack, worst


def convergence_metric(traj: Trajectory, x_star, hd_star: float | None = None) -> dict:
    """Distance-to-target summary of a run.

    `final_error` is the Euclidean distance from the last state to `x_star`.
    `excess_energy_ratio` is (Hd(T) - Hd*) / (Hd(0) - Hd*), guarded to 0
    when the initial excess is below 1e-14.  Hd* defaults to the recorded
    energy function evaluated at `x_star`.

    `x_star` may cover a leading subset of the state: for a mechanical
    system, passing the target positions measures the configuration error
    and sets the remaining momenta to zero for the energy reference.
    """
    target = tuple(float(v) for v in x_star)
    if len(target) > len(traj.state_names):
        raise PfidaError(
            f"x_star has {len(target)} entries, expected at most {len(traj.state_names)}"
        )
    last = traj.states[-1]
    final_error = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(last, target)))
    if hd_star is None:
        if traj.hd_fn is None:
            raise PfidaError("trajectory carries no energy closure; pass hd_star")
        padded = target + (0.0,) * (len(traj.state_names) - len(target))
        hd_star = traj.hd_fn(*padded)
    initial_excess = traj.Hd[0] - hd_star
    if abs(initial_excess) < 1e-14:
        ratio = 0.0
    else:
        ratio = (traj.Hd[-1] - hd_star) / initial_excess
    return {"final_error": final_error, "excess_energy_ratio": ratio}


def write_csv(traj: Trajectory, path) -> None:
    """Write the trajectory as CSV with 17 significant digits per float."""
    n = len(traj.state_names)
    m = len(traj.inputs[0]) if traj.inputs else 0
    header = (
        ["t"]
        + [f"x{i + 1}" for i in range(n)]
        + [f"u{j + 1}" for j in range(m)]
        + ["H", "Hd"]
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for t, x, u, h, hd in zip(traj.times, traj.states, traj.inputs, traj.H, traj.Hd):
            row = [t, *x, *u, h, hd]
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")
