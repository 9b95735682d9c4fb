"""Command-line front end: check cases, solve forms, calibrate, simulate.

Exit codes: 0 success, 1 a check or solve failed, 2 bad input (unknown
case, malformed file, malformed flags).  `PFIDA_SEED` overrides the
default sampling seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import __version__
from .benchmarks import case_names, load_case, verify_case
from .benchmarks.core import DEFAULT_POINTS, DEFAULT_SEED, DEFAULT_TOL, run_scenario
from .errors import (
    DomainEscapeError,
    NonFiniteError,
    NotIntegrableError,
    ParameterizationFailedError,
    PfidaError,
    StageUnsolvableError,
)
from .expr import parse, to_str
from .idapbc import calibrate_equilibrium
from .pfaffian import SolveOptions, five_stage_solve, load_form
from .reporting import Report
from .simulate import convergence_metric, energy_monotone, write_csv

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2


def _default_seed() -> int:
    env = os.environ.get("PFIDA_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        raise PfidaError(f"PFIDA_SEED must be an integer, got {env!r}")


def _print_table(reports):
    width = max((len(r.name) for r in reports), default=4)
    for r in reports:
        verdict = "PASS" if r.passed else "FAIL"
        line = f"  {verdict}  {r.name:<{width}}  {r.max_residual:11.3e}  (tol {r.tolerance:.1e})"
        print(line)
        if r.note:
            print(f"        {' ' * width}  {r.note}")


def cmd_check(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    case = load_case(args.case)
    t0 = time.perf_counter()
    reports = verify_case(case, tol=args.tol, seed=seed, n=args.points)
    elapsed = time.perf_counter() - t0
    print(f"case {case.name}: {len(reports)} checks, seed {seed}, {args.points} points")
    _print_table(reports)
    n_fail = sum(1 for r in reports if not r.passed)
    overall = "PASS" if n_fail == 0 else f"FAIL ({n_fail} failing)"
    print(f"overall: {overall}  [{elapsed:.2f}s]")
    if args.json:
        report = Report(case=case.name, seed=seed, checks=reports, timing_s=elapsed)
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
    return EXIT_OK if n_fail == 0 else EXIT_FAIL


def cmd_solve(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    form = load_form(args.form)
    options = SolveOptions(
        hint_u=parse(args.hint_u) if args.hint_u else None,
        tol=args.tol,
        n=args.points,
        seed=seed,
    )
    try:
        trace = five_stage_solve(form, options)
    except NotIntegrableError as exc:
        print(f"not integrable: {exc}")
        return EXIT_FAIL
    except (StageUnsolvableError, ParameterizationFailedError) as exc:
        stage = f"stage {exc.stage}: " if isinstance(exc, StageUnsolvableError) else ""
        print(f"unsolvable: {stage}{exc}")
        return EXIT_FAIL
    print(f"U       = {to_str(trace.U)}")
    print(f"mu      = {to_str(trace.mu)}")
    print(f"K       = {to_str(trace.K)}")
    print(f"phi_arg = {to_str(trace.phi_arg)}")
    rep = trace.residual_report
    print(str(rep))
    if args.trace:
        for part in rep.parts:
            print("  " + str(part))
        if rep.note:
            print("  " + rep.note)
    return EXIT_OK if rep.passed else EXIT_FAIL


def _parse_x0(text, n_expected):
    try:
        values = tuple(float(v) for v in text.split(","))
    except ValueError:
        raise PfidaError(f"malformed --x0 {text!r}; expected comma-separated floats")
    if len(values) != n_expected:
        raise PfidaError(f"--x0 has {len(values)} entries, expected {n_expected}")
    return values


def cmd_simulate(args) -> int:
    case = load_case(args.case)
    x0 = _parse_x0(args.x0, len(case.state_names())) if args.x0 else None
    try:
        traj = run_scenario(
            case,
            x0=x0,
            dt=args.dt,
            t_final=args.t_final,
            open_loop=args.open_loop,
            record_every=args.record_every,
        )
    except (DomainEscapeError, NonFiniteError) as exc:
        print(f"simulation aborted: {exc}")
        return EXIT_FAIL
    if args.out:
        write_csv(traj, args.out)
        print(f"wrote {len(traj)} rows to {args.out}")
    ok, worst = energy_monotone(traj)
    if args.open_loop:
        drift = max(abs(h - traj.H[0]) for h in traj.H)
        print(f"open loop: H drift {drift:.3e} over t = {traj.times[-1]:g}")
    else:
        print(f"Hd monotone: {'yes' if ok else 'no'} (worst rise {worst:.3e})")
    target = None
    if case.sim is not None and case.sim.q_star:
        target = case.sim.q_star
    elif case.x_star:
        names = case.state_names()
        if all(s in case.x_star for s in names):
            target = tuple(case.x_star[s] for s in names)
    if target is not None:
        metrics = convergence_metric(traj, target)
        print(
            f"final error {metrics['final_error']:.3e}, "
            f"excess energy ratio {metrics['excess_energy_ratio']:.3e}"
        )
    return EXIT_OK


def cmd_calibrate(args) -> int:
    case = load_case(args.case)
    if not case.free_params:
        print(f"case {case.name} declares no calibratable parameters")
        return EXIT_USAGE
    if not case.x_star:
        print(f"case {case.name} assigns no equilibrium")
        return EXIT_USAGE
    if case.kind == "mechanical":
        H_d = case.desired.desired_hamiltonian(case.model)
    else:
        H_d = case.desired.desired_hamiltonian(case.model.H)
    bound, report = calibrate_equilibrium(H_d, case.free_params, case.x_star, case.params)
    path = args.out or f"{case.name}.calibrated.params"
    with open(path, "w", encoding="utf-8") as fh:
        for name in case.free_params:
            fh.write(f"{name} = {bound[name]:.17g}\n")
    for name in case.free_params:
        print(f"{name} = {bound[name]:.17g}")
    print(f"equilibrium gradient norm {report.grad_norm:.3e}, verdict {report.verdict}")
    print(f"wrote {path}")
    return EXIT_OK if report.grad_norm <= report.tolerance else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pfida",
        description="Verification toolkit for matching-PDE controller design.",
    )
    parser.add_argument("--version", action="version", version=f"pfida {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def sampling_flags(p):
        p.add_argument("--points", type=int, default=DEFAULT_POINTS, metavar="N")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("check", help="run a case's verification suite")
    p.add_argument("case", help=f"registry name ({', '.join(case_names())}) or case file path")
    sampling_flags(p)
    p.add_argument("--json", metavar="PATH", help="write the machine-readable report here")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("solve", help="reduce a three-variable form file")
    p.add_argument("form", help="path to a .pf form file")
    sampling_flags(p)
    p.add_argument("--hint-u", metavar="EXPR", help="candidate first integral for the frozen form")
    p.add_argument("--trace", action="store_true", help="print per-stage evidence")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("simulate", help="integrate a case's closed (or open) loop")
    p.add_argument("case")
    p.add_argument("--x0", metavar="V1,...,VN", help="start state; defaults to the case scenario")
    p.add_argument("--open-loop", action="store_true")
    p.add_argument("--dt", type=float, default=None)
    p.add_argument("--t-final", type=float, default=None)
    p.add_argument("--record-every", type=int, default=1, metavar="K")
    p.add_argument("--out", metavar="CSV", help="write the trajectory here")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("calibrate", help="bind a case's free parameters at its equilibrium")
    p.add_argument("case")
    p.add_argument("--out", metavar="PATH", help="sidecar file (default <case>.calibrated.params)")
    p.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DomainEscapeError, NonFiniteError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (PfidaError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
