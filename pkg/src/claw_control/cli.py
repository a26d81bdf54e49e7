"""Command line entry point: ``claw-control <subcommand> --scenario FILE``."""
import argparse
import os
import sys

import numpy as np

from .control import synthesize
from .diagnostics import j_theta, l1_distance, mass_balance_residual
from .exceptions import ClawControlError
from .flux import audit_nondegeneracy
from .io import load_state, save_trajectory, write_plan
from .scenario import (StageError, _Stage, certify_scenario, default_t_end, format_report,
                       generate_target, make_solver, parse_scenario, run_scenario)
from .solver import BoundarySchedule


def _out_dir(args, scenario):
    return args.out or os.path.join(scenario.base_dir, scenario.out_dir)


def _emit(args, text):
    if not args.quiet:
        sys.stdout.write(text)


def cmd_audit_flux(args):
    sc = parse_scenario(args.scenario)
    with _Stage("audit-flux"):
        rep = audit_nondegeneracy(sc.build_flux(), sc.interval)
    _emit(args, format_report({
        "interval": f"{rep.interval[0]!r},{rep.interval[1]!r}",
        "probes": str(rep.n_probes),
        "worst_fraction": repr(rep.worst_fraction),
        "verdict": rep.verdict,
    }))
    return 1 if rep.degenerate else 0


def cmd_certify(args):
    sc = parse_scenario(args.scenario)
    _, cert = certify_scenario(sc)
    _emit(args, cert.to_text())
    return 0


def cmd_simulate(args):
    sc = parse_scenario(args.scenario)
    solver = make_solver(sc, args.threads)
    grid = sc.build_grid()
    with _Stage("simulate"):
        u0 = sc.initial.evaluate(grid, sc.base_dir)
        sched = BoundarySchedule.for_grid(grid, sc.boundary)
        traj = solver.evolve(u0, sched, default_t_end(sc), sc.snapshot_every, sc.interval)
    out = _out_dir(args, sc)
    os.makedirs(out, exist_ok=True)
    save_trajectory(traj, os.path.join(out, "simulated.clg1"), sc.save_every)
    lo, hi = traj.final.range
    _emit(args, format_report({
        "t_end": repr(traj.final.t),
        "steps": str(len(traj.dts)),
        "min": repr(lo),
        "max": repr(hi),
        "mass_balance_residual": repr(mass_balance_residual(traj) if traj.dts else 0.0),
    }))
    return 0


def cmd_synthesize(args):
    sc = parse_scenario(args.scenario)
    _, cert = certify_scenario(sc)
    solver = make_solver(sc, args.threads)
    target = generate_target(sc, cert, solver, sc.build_grid())
    with _Stage("synthesize"):
        plan = synthesize(target, sc.T1, sc.T2, cert, sc.b)
    out = _out_dir(args, sc)
    os.makedirs(out, exist_ok=True)
    write_plan(plan, os.path.join(out, "plan.csv"))
    _emit(args, format_report(plan.header()))
    return 0


def cmd_control(args):
    sc = parse_scenario(args.scenario)
    status, result = run_scenario(sc, _out_dir(args, sc), args.threads)
    if isinstance(result, StageError):
        raise result
    _emit(args, format_report(result.report))
    return status


def cmd_diff(args):
    a = load_state(args.state_a)
    b = load_state(args.state_b)
    out = {"l1": repr(l1_distance(a, b))}
    if args.theta is not None:
        w = (np.array([float(x) for x in args.direction.split(",")]) if args.direction
             else np.eye(a.grid.dimension)[0])
        w = w / np.linalg.norm(w)
        out["theta"] = repr(args.theta)
        out["J_theta"] = repr(j_theta(a, b, w, args.theta))
    _emit(args, format_report(out))
    return 0


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output directory (overrides [output] dir)")
    common.add_argument("--threads", type=int, default=1,
                        help="worker threads; affects speed only, never results")
    common.add_argument("--quiet", action="store_true")

    parser = argparse.ArgumentParser(prog="claw-control",
                                     description="Boundary control of scalar conservation laws")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, helptext in [
        ("audit-flux", cmd_audit_flux, "non-degeneracy audit of the flux on the data interval"),
        ("certify", cmd_certify, "replacement-condition certificate"),
        ("simulate", cmd_simulate, "evolve the initial state under the constant boundary datum"),
        ("synthesize", cmd_synthesize, "generate the target and write the control plan"),
        ("control", cmd_control, "full pipeline with verification"),
    ]:
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--scenario", required=True)
        p.set_defaults(func=func)
    p = sub.add_parser("diff", parents=[common], help="L1 / J_theta between two saved states")
    p.add_argument("state_a")
    p.add_argument("state_b")
    p.add_argument("--theta", type=float)
    p.add_argument("--direction", help="comma separated w (default: first axis)")
    p.set_defaults(func=cmd_diff)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        sys.stderr.write("error: --threads must be >= 1\n")
        return 2
    try:
        return args.func(args)
    except StageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ClawControlError, OSError) as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
