"""Scenario files and the end-to-end control pipeline.

Format: ``key = value`` lines grouped under ``[flux]``, ``[domain]``,
``[data]``, ``[control]`` and ``[output]``; ``#`` starts a comment. Initial
conditions are written as a catalogue name followed by ``key=value``
parameters, e.g. ``sine-bump base=1.5 amplitude=0.3``.
"""
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .control import profile_at, synthesize
from .diagnostics import (check_decay, final_match_report, mass_balance_residual,
                          range_violation)
from .exceptions import ClawControlError, ParseError, ValidationError
from .flux import Flux, audit_nondegeneracy
from .grid import BoxDomain, Grid
from .io import load_state, load_trajectory, save_trajectory, write_plan
from .replacement import search_direction
from .solver import DEFAULT_CFL, BoundarySchedule, FiniteVolumeSolver, State

RANGE_SLACK = 1e-12
MASS_TOL = 1e-10

KEYS = {
    "flux": {"name", "params", "table", "numerical"},
    "domain": {"lower", "upper", "cells"},
    "data": {"interval", "initial", "target_initial", "target_boundary", "target_file",
             "boundary", "t_end"},
    "control": {"T1", "T2", "b", "theta", "snapshot_every", "cfl", "directions",
                "match_tolerance"},
    "output": {"dir", "save_every"},
}


def _floats(text, field_name):
    try:
        return tuple(float(x) for x in text.replace(" ", "").split(",") if x)
    except ValueError:
        raise ValidationError(field_name, f"expected numbers, got {text!r}") from None


def _float(text, field_name):
    vals = _floats(text, field_name)
    if len(vals) != 1:
        raise ValidationError(field_name, f"expected one number, got {text!r}")
    return vals[0]


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    params: dict = field(default_factory=dict)

    @classmethod
    def parse(cls, text, field_name):
        tokens = text.split()
        if not tokens:
            raise ValidationError(field_name, "empty initial-condition spec")
        params = {}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise ValidationError(field_name, f"expected key=value, got {tok!r}")
            k, v = tok.split("=", 1)
            params[k] = v
        spec = cls(tokens[0], params)
        if spec.kind not in INITIAL_CONDITIONS:
            raise ValidationError(field_name, f"unknown initial condition {spec.kind!r}")
        return spec

    def evaluate(self, grid, base_dir="."):
        return INITIAL_CONDITIONS[self.kind](grid, self.params, base_dir)


def _param(params, key, default=None, vector=False):
    if key not in params:
        if default is None:
            raise ValidationError(key, "missing initial-condition parameter")
        return default
    vals = _floats(params[key], key)
    return vals if vector else vals[0]


def _ic_constant(grid, p, _):
    return State.constant(grid, _param(p, "value"))


def _ic_sine_bump(grid, p, _):
    base = _param(p, "base")
    amp = _param(p, "amplitude")
    k = _param(p, "wavenumber", 1.0)
    def func(*x):
        prod = 1.0
        for xi, lo, w in zip(x, grid.domain.lower, grid.domain.widths):
            prod = prod * np.sin(2.0 * np.pi * k * (xi - lo) / w)
        return base + amp * prod
    return State.from_function(grid, func)


def _ic_riemann(grid, p, _):
    axis = int(_param(p, "axis", 0.0))
    lo, w = grid.domain.lower[axis], grid.domain.widths[axis]
    pos = _param(p, "position", lo + 0.5 * w)
    left, right = _param(p, "left"), _param(p, "right")
    return State.from_function(grid, lambda *x: np.where(x[axis] < pos, left, right))


def _ic_checkerboard(grid, p, _):
    low, high = _param(p, "low"), _param(p, "high")
    tiles = _param(p, "tiles", 2.0)
    def func(*x):
        parity = sum(np.floor(tiles * (xi - lo) / w)
                     for xi, lo, w in zip(x, grid.domain.lower, grid.domain.widths))
        return np.where(np.mod(parity, 2) == 0, low, high)
    return State.from_function(grid, func)


def _ic_linear(grid, p, _):
    base = _param(p, "base")
    slope = _param(p, "slope", vector=True)
    if len(slope) == 1:
        slope = slope + (0.0,) * (grid.dimension - 1)
    def func(*x):
        return base + sum(s * (xi - lo) for s, xi, lo in zip(slope, x, grid.domain.lower))
    return State.from_function(grid, func)


def _ic_box(grid, p, _):
    base, height = _param(p, "base"), _param(p, "height")
    lo = _param(p, "lower", vector=True)
    hi = _param(p, "upper", vector=True)
    def func(*x):
        inside = np.ones(np.shape(x[0]), dtype=bool)
        for xi, a, b in zip(x, lo, hi):
            inside &= (xi > a) & (xi < b)
        return base + height * inside
    return State.from_function(grid, func)


def _ic_file(grid, p, base_dir):
    if "path" not in p:
        raise ValidationError("path", "file initial condition needs path=")
    path = os.path.join(base_dir, p["path"])
    state = load_state(path, grid if path.endswith(".csv") else None)
    if state.grid != grid:
        raise ValidationError("initial", f"{path} is on a different grid")
    return state.with_time(0.0)


INITIAL_CONDITIONS = {
    "constant": _ic_constant,
    "sine-bump": _ic_sine_bump,
    "riemann": _ic_riemann,
    "checkerboard": _ic_checkerboard,
    "linear": _ic_linear,
    "box": _ic_box,
    "file": _ic_file,
}


@dataclass(frozen=True)
class Scenario:
    flux_name: str
    domain: BoxDomain
    cells: tuple
    interval: tuple
    initial: InitialSpec
    T1: float
    T2: float
    flux_params: tuple = ()
    flux_table: str = None
    numerical_flux: str = "auto"
    target_initial: InitialSpec = None
    target_boundary: float = None
    target_file: str = None
    boundary: float = None
    t_end: float = None
    b: float = None
    theta: float = None
    snapshot_every: int = 1
    cfl: float = DEFAULT_CFL
    directions: int = 64
    match_tolerance: float = 0.05
    out_dir: str = "out"
    save_every: int = 1
    base_dir: str = "."

    def build_flux(self):
        if self.flux_name == "tabulated":
            return Flux.from_table(os.path.join(self.base_dir, self.flux_table))
        return Flux.builtin(self.flux_name, self.flux_params)

    def build_grid(self):
        return Grid(self.domain, self.cells)

    def resolve_theta(self, cert):
        return self.theta if self.theta is not None else 5.0 / cert.L


def parse_scenario_text(text, base_dir="."):
    sections = {}
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ParseError(f"malformed section header {raw.strip()!r}", lineno)
            current = line[1:-1].strip()
            if current not in KEYS:
                raise ParseError(f"unknown section [{current}]", lineno)
            if current in sections:
                raise ParseError(f"duplicate section [{current}]", lineno)
            sections[current] = {}
            continue
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {raw.strip()!r}", lineno)
        if current is None:
            raise ParseError("key outside of any section", lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in KEYS[current]:
            raise ParseError(f"unknown key {key!r} in [{current}]", lineno)
        if key in sections[current]:
            raise ParseError(f"duplicate key {key!r}", lineno)
        sections[current][key] = value
    return _build(sections, base_dir)


def _require(sec, key, section):
    if key not in sec:
        raise ValidationError(key, f"missing required key in [{section}]")
    return sec[key]


def _build(sections, base_dir):
    fl = sections.get("flux", {})
    dm = sections.get("domain", {})
    da = sections.get("data", {})
    co = sections.get("control", {})
    ou = sections.get("output", {})

    name = _require(fl, "name", "flux")
    params = tuple(x.strip() for x in fl.get("params", "").split(",") if x.strip())
    if name == "tabulated" and "table" not in fl:
        raise ValidationError("table", "tabulated flux needs a table path")

    lower = _floats(_require(dm, "lower", "domain"), "lower")
    upper = _floats(_require(dm, "upper", "domain"), "upper")
    cells = _floats(_require(dm, "cells", "domain"), "cells")
    if len(lower) != len(upper) or len(cells) != len(lower):
        raise ValidationError("domain", "lower, upper and cells need one entry per axis")
    if any(c != int(c) or c < 2 for c in cells):
        raise ValidationError("cells", "cell counts must be integers >= 2")
    try:
        domain = BoxDomain(lower, upper)
    except ValueError as exc:
        raise ValidationError("domain", str(exc)) from None

    interval = _floats(_require(da, "interval", "data"), "interval")
    if len(interval) != 2 or not interval[0] < interval[1]:
        raise ValidationError("interval", "need A < B")
    A, B = interval
    initial = InitialSpec.parse(_require(da, "initial", "data"), "initial")
    target_initial = (InitialSpec.parse(da["target_initial"], "target_initial")
                      if "target_initial" in da else None)
    if target_initial is None and "target_file" not in da:
        raise ValidationError("target_initial", "give target_initial or target_file")

    T1 = _float(_require(co, "T1", "control"), "T1")
    T2 = _float(_require(co, "T2", "control"), "T2")
    if not (T1 > 0 and T2 > 0):
        raise ValidationError("T1", "T1 and T2 must be positive")
    b = _float(co["b"], "b") if "b" in co else 0.5 * (A + B)
    theta = _float(co["theta"], "theta") if "theta" in co else None
    target_boundary = _float(da["target_boundary"], "target_boundary") if "target_boundary" in da else 0.5 * (A + B)
    boundary = _float(da["boundary"], "boundary") if "boundary" in da else target_boundary
    cfl = _float(co.get("cfl", repr(DEFAULT_CFL)), "cfl")
    if not 0.0 < cfl <= 1.0:
        raise ValidationError("cfl", "CFL number must lie in (0, 1]")
    snapshot_every = int(_float(co.get("snapshot_every", "1"), "snapshot_every"))
    if snapshot_every < 1:
        raise ValidationError("snapshot_every", "must be >= 1")

    sc = Scenario(
        flux_name=name, flux_params=params, flux_table=fl.get("table"),
        numerical_flux=fl.get("numerical", "auto"),
        domain=domain, cells=tuple(int(c) for c in cells), interval=(A, B),
        initial=initial, target_initial=target_initial, target_boundary=target_boundary,
        target_file=da.get("target_file"), boundary=boundary,
        t_end=_float(da["t_end"], "t_end") if "t_end" in da else None,
        T1=T1, T2=T2, b=b, theta=theta, snapshot_every=snapshot_every, cfl=cfl,
        directions=int(_float(co.get("directions", "64"), "directions")),
        match_tolerance=_float(co.get("match_tolerance", "0.05"), "match_tolerance"),
        out_dir=ou.get("dir", "out"),
        save_every=int(_float(ou.get("save_every", "1"), "save_every")),
        base_dir=base_dir,
    )
    if sc.numerical_flux not in ("auto", "godunov", "engquist-osher"):
        raise ValidationError("numerical", f"unknown numerical flux {sc.numerical_flux!r}")
    if sc.flux_name not in ("burgers", "cubic", "diagonal-burgers", "skew", "affine", "tabulated"):
        raise ValidationError("name", f"unknown flux {sc.flux_name!r}")
    grid = sc.build_grid()
    for label, spec in (("initial", initial), ("target_initial", target_initial)):
        if spec is None:
            continue
        lo, hi = spec.evaluate(grid, base_dir).range
        if lo < A - RANGE_SLACK or hi > B + RANGE_SLACK:
            raise ValidationError(label, f"range [{lo}, {hi}] leaves the interval [{A}, {B}]")
    return sc


def parse_scenario(path):
    with open(path) as fh:
        text = fh.read()
    return parse_scenario_text(text, os.path.dirname(os.path.abspath(path)))


class StageError(ClawControlError):
    def __init__(self, stage, error):
        self.stage = stage
        self.error = error
        super().__init__(f"[{stage}] {type(error).__name__}: {error}")


class _Stage:
    def __init__(self, name):
        self.name = name

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None and isinstance(exc, (ClawControlError, ValueError, ArithmeticError,
                                                LookupError, OSError)) \
                and not isinstance(exc, StageError):
            raise StageError(self.name, exc) from exc
        return False


def make_solver(scenario, threads=1):
    return FiniteVolumeSolver(scenario.build_flux(), scenario.numerical_flux,
                              scenario.cfl, threads)


def certify_scenario(scenario):
    flux = scenario.build_flux()
    with _Stage("audit-flux"):
        audit = audit_nondegeneracy(flux, scenario.interval)
    with _Stage("certify"):
        cert = search_direction(flux, scenario.interval, scenario.domain, scenario.directions)
    return audit, cert


def generate_target(scenario, cert, solver, grid):
    """Target trajectory v on [0, T2], hitting the times the plan will read."""
    with _Stage("target"):
        if scenario.target_file is not None:
            return load_trajectory(os.path.join(scenario.base_dir, scenario.target_file))
        v0 = scenario.target_initial.evaluate(grid, scenario.base_dir)
        sched = BoundarySchedule.for_grid(grid, scenario.target_boundary)
        T1, T2 = scenario.T1, scenario.T2
        stop = T2 - T1 if T2 >= T1 else T2 - cert.t_star
        return solver.evolve(v0, sched, T2, scenario.snapshot_every, scenario.interval,
                             stops=(stop,))


@dataclass
class PipelineResult:
    audit: object
    certificate: object
    target: object
    plan: object
    controlled: object
    replay: object
    decay: object
    final_match: float
    report: dict
    passed: bool


def run_pipeline(scenario, threads=1):
    """Audit, certify, generate the target, synthesize, steer and verify."""
    audit, cert = certify_scenario(scenario)
    solver = make_solver(scenario, threads)
    grid = scenario.build_grid()
    I = scenario.interval
    T1, T2 = scenario.T1, scenario.T2
    target = generate_target(scenario, cert, solver, grid)
    with _Stage("synthesize"):
        plan = synthesize(target, T1, T2, cert, scenario.b)
        target_profile = profile_at(target, T2)
    with _Stage("control"):
        u0 = scenario.initial.evaluate(grid, scenario.base_dir)
        switch = T1 - cert.t_star
        stops = (switch,) if plan.case == "T1>T2" else ()
        controlled = solver.evolve(u0, plan.schedule, T1, scenario.snapshot_every, I, stops=stops)
    with _Stage("verify"):
        if plan.case == "T2>=T1":
            w0 = profile_at(target, T2 - T1).with_time(0.0)
            u_part = controlled
        else:
            w0 = profile_at(target, T2 - cert.t_star).with_time(switch)
            u_part = controlled.window(switch, T1)
        replay = solver.evolve(w0, plan.schedule, T1, scenario.snapshot_every, I)
        theta = scenario.resolve_theta(cert)
        decay = check_decay(u_part, replay, cert, theta)
        final_match = final_match_report(controlled, target_profile, T1)
        max_excursion = max(range_violation(t, I) for t in (target, controlled, replay))
        mass = max(mass_balance_residual(t) for t in (target, controlled, replay)
                   if len(t.dts))
    checks = {
        "nondegenerate": not audit.degenerate,
        "decay": decay.verdict,
        "final_match": final_match <= scenario.match_tolerance,
        "maximum_principle": max_excursion <= RANGE_SLACK,
        "conservation": mass <= MASS_TOL,
    }
    report = {
        "case": plan.case,
        "T1": repr(T1),
        "T2": repr(T2),
        "t_star": repr(cert.t_star),
        "c": repr(cert.c),
        "L": repr(cert.L),
        "w": ",".join(repr(x) for x in cert.w),
        "b": "none" if plan.b is None else repr(plan.b),
        "theta": repr(theta),
        "degeneracy_fraction": repr(audit.worst_fraction),
        "final_match": repr(final_match),
        "match_tolerance": repr(scenario.match_tolerance),
        "decay_floor": repr(decay.floor),
        "decay_measured_rate": repr(decay.measured_rate),
        "decay_predicted_rate": repr(decay.predicted_rate),
        "sync_time": repr(decay.sync_time),
        "max_principle_excursion": repr(max_excursion),
        "mass_balance_residual": repr(mass),
    }
    for key, ok in checks.items():
        report[f"verdict_{key}"] = "pass" if ok else "fail"
    passed = all(checks.values())
    report["status"] = "pass" if passed else "fail"
    return PipelineResult(audit, cert, target, plan, controlled, replay, decay,
                          final_match, report, passed)


def format_report(report):
    return "".join(f"{k}={v}\n" for k, v in report.items())


def write_outputs(result, out_dir, save_every=1):
    os.makedirs(out_dir, exist_ok=True)
    save_trajectory(result.target, os.path.join(out_dir, "target.clg1"), save_every)
    save_trajectory(result.controlled, os.path.join(out_dir, "controlled.clg1"), save_every)
    write_plan(result.plan, os.path.join(out_dir, "plan.csv"))
    with open(os.path.join(out_dir, "decay.csv"), "w") as fh:
        fh.write(result.decay.to_csv())
    with open(os.path.join(out_dir, "report.txt"), "w") as fh:
        fh.write(format_report(result.report))


def run_scenario(scenario, out_dir=None, threads=1):
    """Full pipeline with artifacts; returns ``(exit_status, result_or_error)``."""
    out_dir = out_dir or os.path.join(scenario.base_dir, scenario.out_dir)
    try:
        result = run_pipeline(scenario, threads)
    except StageError as exc:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "report.txt"), "w") as fh:
            fh.write(format_report({"stage": exc.stage, "error": type(exc.error).__name__,
                                    "message": str(exc.error).replace("\n", " "),
                                    "status": "fail"}))
        return 2, exc
    write_outputs(result, out_dir, scenario.save_every)
    return (0 if result.passed else 1), result


def with_resolution(scenario, cells):
    return replace(scenario, cells=tuple(int(c) for c in cells))


def default_t_end(scenario):
    return scenario.t_end if scenario.t_end is not None else scenario.T1


__all__ = ["Scenario", "InitialSpec", "parse_scenario", "parse_scenario_text", "run_pipeline",
           "run_scenario", "StageError"]
