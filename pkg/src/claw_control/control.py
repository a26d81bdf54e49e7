"""Boundary traces, time slices and synthesis of steering controls."""
from dataclasses import dataclass

import numpy as np

from .exceptions import (HorizonTooShort, InsufficientData, InvalidConstantState,
                         InvalidInterval, SnapshotMiss)
from .solver import BoundarySchedule

SNAPSHOT_TOL = 1e-9
CONTAINMENT_SLACK = 1e-12

CONSTANT_PHASE = "constant-phase"
TRACE_PHASE = "target-trace-phase"


def extract_trace(trajectory):
    """Adjacent-cell trace of every boundary face at every snapshot time.

    Breakpoints are the snapshot times. A trajectory starting after t = 0
    has its first trace value extended back to 0.
    """
    snaps = trajectory.snapshots
    if len(snaps) < 2:
        raise InsufficientData("a trace needs at least two snapshots")
    grid = snaps[0].grid
    times = [s.t for s in snaps]
    values = [grid.boundary_values(s.values) for s in snaps]
    if times[0] > 0.0:
        times = [0.0] + times
        values = [values[0]] + values
    return BoundarySchedule(np.array(times), np.stack(values))


def profile_at(trajectory, t, tol=SNAPSHOT_TOL):
    times = trajectory.times
    i = int(np.argmin(np.abs(times - t)))
    if abs(times[i] - t) > tol:
        raise SnapshotMiss(f"no snapshot within {tol} of t={t} (nearest {times[i]})")
    return trajectory.snapshots[i]


@dataclass(frozen=True, eq=False)
class ControlPlan:
    T1: float
    T2: float
    schedule: BoundarySchedule
    provenance: tuple
    certificate: object
    b: float = None

    @property
    def case(self):
        return "T2>=T1" if self.T2 >= self.T1 else "T1>T2"

    def header(self):
        c = self.certificate
        return {
            "T1": repr(self.T1),
            "T2": repr(self.T2),
            "t_star": repr(c.t_star),
            "b": "none" if self.b is None else repr(self.b),
            "case": self.case,
        }


def _covers(trajectory, start, end):
    times = trajectory.times
    return times[0] <= start + SNAPSHOT_TOL and times[-1] >= end - SNAPSHOT_TOL


def _shifted_rows(trace_times, trace_values, src_start, dst_start, dst_end):
    """Trace rows from ``src_start`` on, re-timed so ``src_start`` maps to ``dst_start``."""
    j0 = max(int(np.searchsorted(trace_times, src_start, side="right")) - 1, 0)
    times = [dst_start]
    rows = [trace_values[j0]]
    shift = dst_start - src_start
    for j in range(j0 + 1, trace_times.size):
        t = trace_times[j] + shift
        if t >= dst_end:
            break
        if t > times[-1]:
            times.append(t)
            rows.append(trace_values[j])
    return times, rows


def synthesize(target, T1, T2, cert, b=None):
    """Boundary control steering any admissible state to ``target(T2)`` at ``T1``.

    ``T2 >= T1``: replay the target trace from ``T2 - T1``. ``T1 > T2``: hold
    the constant ``b`` until ``T1 - t_star``, then replay the trace from
    ``T2 - t_star``.
    """
    T1, T2 = float(T1), float(T2)
    A, B = cert.interval
    if not (T1 > cert.t_star and T2 > cert.t_star):
        raise HorizonTooShort(f"T1={T1}, T2={T2} must both exceed t_star={cert.t_star}")
    if b is None:
        b = 0.5 * (A + B)
    b = float(b)
    if not A <= b <= B:
        raise InvalidConstantState(f"b={b} outside [{A}, {B}]")
    trace = extract_trace(target)
    trace_times = trace.times
    T_star = cert.t_star
    if T2 >= T1:
        start = T2 - T1
        if not _covers(target, start, T2):
            raise InsufficientData(f"target must cover [{start}, {T2}]")
        times, rows = _shifted_rows(trace_times, trace.values, start, 0.0, T1)
        provenance = (TRACE_PHASE,) * len(times)
        used_b = None
    else:
        start = T2 - T_star
        if not _covers(target, start, T2):
            raise InsufficientData(f"target must cover [{start}, {T2}]")
        switch = T1 - T_star
        times, rows = _shifted_rows(trace_times, trace.values, start, switch, T1)
        times = [0.0] + times
        rows = [np.full(trace.n_faces, b)] + rows
        provenance = (CONSTANT_PHASE,) + (TRACE_PHASE,) * (len(times) - 1)
        used_b = b
    values = np.array(rows)
    lo, hi = values.min(), values.max()
    if lo < A - CONTAINMENT_SLACK or hi > B + CONTAINMENT_SLACK:
        raise InvalidInterval(f"target trace range [{lo}, {hi}] leaves [{A}, {B}]")
    # absorb round-off excursions so the plan stays inside I
    values = np.clip(values, A, B)
    schedule = BoundarySchedule(np.array(times), values)
    return ControlPlan(T1, T2, schedule, provenance, cert, used_b)
