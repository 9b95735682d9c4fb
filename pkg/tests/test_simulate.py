import math

import pytest

from pfida.errors import DomainEscapeError, NonFiniteError, PfidaError
from pfida.expr import Domain, parse
from pfida.idapbc import DesiredStructure, PCHSystem
from pfida.simulate import (
    SimConfig,
    simulate,
    convergence_metric,
    energy_monotone,
    write_csv,
)

WIDE = Domain({"x1": (-5.0, 5.0), "x2": (-5.0, 5.0)})


def oscillator(domain=WIDE):
    return PCHSystem(
        ("x1", "x2"),
        J=[["0", "1"], ["-1", "0"]],
        R=[["0", "0"], ["0", "0"]],
        H=parse("0.5*x1^2 + 0.5*x2^2"),
        g=[["0"], ["1"]],
        g_perp=[["1", "0"]],
        domain=domain,
    )


def test_config_validation():
    with pytest.raises(PfidaError):
        SimConfig(x0=(1.0, 0.0), dt=0.0)
    with pytest.raises(PfidaError):
        SimConfig(x0=(1.0, 0.0), dt=1.0, t_final=0.5)
    with pytest.raises(PfidaError):
        SimConfig(x0=(1.0, 0.0), method="euler")


def test_open_loop_conserves_energy():
    traj = simulate(oscillator(), None, SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=10.0))
    drift = max(abs(h - traj.H[0]) for h in traj.H)
    assert drift <= 1e-8


def test_rk4_order_factor():
    # halving dt should shrink the final-state error by about 2^4
    def final_error(dt):
        traj = simulate(oscillator(), None, SimConfig(x0=(1.0, 0.0), dt=dt, t_final=2.0))
        x1, x2 = traj.states[-1]
        t = traj.times[-1]
        return math.hypot(x1 - math.cos(t), x2 + math.sin(t))

    factor = final_error(0.02) / final_error(0.01)
    assert 8.0 <= factor <= 32.0


def test_determinism():
    cfg = SimConfig(x0=(0.7, -0.2), dt=1e-3, t_final=1.0)
    a = simulate(oscillator(), None, cfg)
    b = simulate(oscillator(), None, cfg)
    assert a.states == b.states
    assert a.H == b.H


def test_x0_must_match_dimension():
    with pytest.raises(PfidaError):
        simulate(oscillator(), None, SimConfig(x0=(1.0,), dt=1e-3, t_final=1.0))


def test_x0_outside_domain():
    with pytest.raises(PfidaError):
        simulate(oscillator(), None, SimConfig(x0=(9.0, 0.0), dt=1e-3, t_final=1.0))


def test_domain_escape_carries_partial():
    tight = Domain({"x1": (-0.5, 1.5), "x2": (-0.5, 0.5)})
    with pytest.raises(DomainEscapeError) as exc:
        simulate(oscillator(tight), None, SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=10.0))
    assert exc.value.partial is not None
    assert len(exc.value.partial) > 0
    assert exc.value.time is not None


def test_nonfinite_detected():
    # du/dt = u^2 with u(0) = 1 blows up at t = 1
    blowup = PCHSystem(
        ("x1",),
        J=[["0"]],
        R=[["0"]],
        H=parse("x1"),
        g=[["1"]],
        g_perp=[],
        domain=Domain({"x1": (0.0, 1e308)}),
    )
    controller = [parse("x1^2")]
    with pytest.raises(NonFiniteError):
        simulate(blowup, controller, SimConfig(x0=(1.0,), dt=1e-3, t_final=2.0))


def test_record_every_thins_output():
    full = simulate(oscillator(), None, SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=1.0))
    thin = simulate(
        oscillator(), None, SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=1.0, record_every=10)
    )
    assert len(full) == 1001
    assert len(thin) == 101
    assert thin.times[-1] == pytest.approx(1.0)


def test_energy_monotone():
    damped = PCHSystem(
        ("x1", "x2"),
        J=[["0", "1"], ["-1", "0"]],
        R=[["0", "0"], ["0", "0.3"]],
        H=parse("0.5*x1^2 + 0.5*x2^2"),
        g=[["0"], ["1"]],
        g_perp=[["1", "0"]],
        domain=WIDE,
    )
    traj = simulate(damped, None, SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=5.0))
    ok, worst = energy_monotone(traj)
    assert ok and worst == 0.0
    rising = simulate(oscillator(), [parse("x2")], SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=2.0))
    ok, worst = energy_monotone(rising)
    assert not ok and worst > 0.0


def test_convergence_metric():
    traj = simulate(oscillator(), None, SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=1.0))
    metrics = convergence_metric(traj, (0.0, 0.0))
    assert metrics["final_error"] == pytest.approx(1.0, abs=1e-6)
    assert metrics["excess_energy_ratio"] == pytest.approx(1.0, abs=1e-6)
    with pytest.raises(PfidaError):
        convergence_metric(traj, (0.0, 0.0, 0.0))


def test_convergence_metric_partial_target():
    traj = simulate(oscillator(), None, SimConfig(x0=(1.0, 0.0), dt=1e-3, t_final=1.0))
    metrics = convergence_metric(traj, (math.cos(1.0),))
    assert metrics["final_error"] == pytest.approx(0.0, abs=1e-6)


def test_write_csv(tmp_path):
    traj = simulate(
        oscillator(), [parse("0")], SimConfig(x0=(1.0, 0.0), dt=0.1, t_final=0.3)
    )
    path = tmp_path / "traj.csv"
    write_csv(traj, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "t,x1,x2,u1,H,Hd"
    assert len(lines) == 1 + len(traj)
    row = lines[1].split(",")
    assert float(row[0]) == 0.0
    assert float(row[1]) == 1.0
    # 17 significant digits survive a round trip
    assert float(lines[-1].split(",")[4]) == traj.H[-1]
