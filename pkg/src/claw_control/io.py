"""File formats for states, trajectories, schedules and plans.

CLG1 record: one ASCII header line
``CLG1 d n1 .. nd lower1 .. lowerd upper1 .. upperd t`` followed by the cell
values as little-endian float64 in C order. A trajectory file is a plain
concatenation of records, one per snapshot.
"""
import csv
import io as _io

import numpy as np

from .exceptions import ParseError
from .grid import BoxDomain, Grid
from .solver import BoundarySchedule, State, Trajectory

MAGIC = "CLG1"


def _fmt(x):
    return repr(float(x))


def write_state_csv(state, path):
    grid = state.grid
    d = grid.dimension
    coords = grid.centers.reshape(-1, d)
    vals = state.values.ravel()
    with open(path, "w", newline="") as fh:
        fh.write(",".join([f"x{i}" for i in range(1, d + 1)] + ["u"]) + "\n")
        for x, u in zip(coords, vals):
            fh.write(",".join([_fmt(c) for c in x] + [_fmt(u)]) + "\n")


def read_state_csv(path, grid=None, t=0.0):
    """Read a ``x1,...,xd,u`` CSV; the uniform grid is inferred when not given."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header = [h.strip() for h in rows[0]]
    d = len(header) - 1
    if d < 1 or header != [f"x{i}" for i in range(1, d + 1)] + ["u"]:
        raise ParseError(f"bad state CSV header {header}", 1)
    data = np.array([[float(x) for x in r] for r in rows[1:] if r])
    coords, vals = data[:, :d], data[:, d]
    if grid is None:
        axes = [np.unique(coords[:, i]) for i in range(d)]
        lower, upper = [], []
        for ax in axes:
            h = (ax[-1] - ax[0]) / (ax.size - 1)
            # snap away the round-off of reconstructing faces from centers
            lower.append(round(ax[0] - h / 2, 12))
            upper.append(round(ax[-1] + h / 2, 12))
        grid = Grid(BoxDomain(tuple(lower), tuple(upper)), tuple(a.size for a in axes))
    if vals.size != grid.n_cells:
        raise ParseError(f"expected {grid.n_cells} rows, found {vals.size}")
    if np.max(np.abs(coords - grid.centers.reshape(-1, d))) > 1e-9:
        raise ParseError("cell coordinates do not match the grid (row order must be lexicographic)")
    return State(grid, vals.reshape(grid.shape), t)


def _clg1_header(state):
    g = state.grid
    parts = [MAGIC, str(g.dimension)] + [str(n) for n in g.shape]
    parts += [_fmt(x) for x in g.domain.lower] + [_fmt(x) for x in g.domain.upper] + [_fmt(state.t)]
    return " ".join(parts) + "\n"


def write_clg1(fh, state):
    fh.write(_clg1_header(state).encode("ascii"))
    fh.write(np.ascontiguousarray(state.values, dtype="<f8").tobytes())


def save_state(state, path):
    with open(path, "wb") as fh:
        write_clg1(fh, state)


def save_trajectory(trajectory, path, every=1):
    """Write snapshots ``0, every, 2*every, ...`` and always the last one."""
    snaps = trajectory.snapshots
    keep = list(range(0, len(snaps), max(int(every), 1)))
    if keep[-1] != len(snaps) - 1:
        keep.append(len(snaps) - 1)
    with open(path, "wb") as fh:
        for i in keep:
            write_clg1(fh, snaps[i])


def _read_records(fh):
    states, grid_cache = [], {}
    while True:
        line = fh.readline()
        if not line:
            break
        parts = line.decode("ascii").split()
        if not parts or parts[0] != MAGIC:
            raise ParseError(f"not a CLG1 record: {line[:40]!r}")
        d = int(parts[1])
        if len(parts) != 2 + 3 * d + 1:
            raise ParseError("malformed CLG1 header")
        shape = tuple(int(x) for x in parts[2:2 + d])
        lower = tuple(float(x) for x in parts[2 + d:2 + 2 * d])
        upper = tuple(float(x) for x in parts[2 + 2 * d:2 + 3 * d])
        t = float(parts[-1])
        key = (shape, lower, upper)
        if key not in grid_cache:
            grid_cache[key] = Grid(BoxDomain(lower, upper), shape)
        grid = grid_cache[key]
        raw = fh.read(8 * grid.n_cells)
        if len(raw) != 8 * grid.n_cells:
            raise ParseError("truncated CLG1 payload")
        states.append(State(grid, np.frombuffer(raw, dtype="<f8").reshape(shape), t))
    return states


def load_states(path):
    with open(path, "rb") as fh:
        return _read_records(fh)


def load_state(path, grid=None):
    """Single state from CLG1 (first record) or CSV, chosen by extension."""
    if str(path).endswith(".csv"):
        return read_state_csv(path, grid)
    states = load_states(path)
    if not states:
        raise ParseError("empty CLG1 file")
    return states[0]


def load_trajectory(path, schedule=None):
    states = load_states(path)
    if not states:
        raise ParseError("empty trajectory file")
    if schedule is None:
        schedule = BoundarySchedule.for_grid(states[0].grid, 0.0)
    return Trajectory(states, schedule, metadata={"source": str(path)})


def schedule_to_csv(schedule):
    buf = _io.StringIO()
    buf.write("face_id,t_start,value\n")
    for t, row in zip(schedule.times, schedule.values):
        for face, v in enumerate(row):
            buf.write(f"{face},{_fmt(t)},{_fmt(v)}\n")
    return buf.getvalue()


def write_schedule_csv(schedule, path):
    with open(path, "w", newline="") as fh:
        fh.write(schedule_to_csv(schedule))


def parse_schedule_csv(text, n_faces=None):
    """Rows ``face_id,t_start,value`` in any order; per-face breakpoints may differ.

    Breakpoints are merged and each face keeps its latest value at every
    merged time, which leaves every face's function unchanged.
    """
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or [h.strip() for h in lines[0].split(",")] != ["face_id", "t_start", "value"]:
        raise ParseError("schedule CSV must start with header face_id,t_start,value")
    per_face = {}
    for lineno, ln in enumerate(lines[1:], start=2):
        try:
            f, t, v = ln.split(",")
            per_face.setdefault(int(f), []).append((float(t), float(v)))
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    nf = n_faces if n_faces is not None else max(per_face) + 1
    if sorted(per_face) != list(range(nf)):
        raise ParseError(f"schedule must define faces 0..{nf - 1}")
    times = np.unique(np.concatenate([[t for t, _ in per_face[f]] for f in range(nf)]))
    values = np.empty((times.size, nf))
    for f in range(nf):
        pts = sorted(per_face[f])
        ft = np.array([t for t, _ in pts])
        if ft[0] != 0.0:
            raise ParseError(f"face {f} schedule must start at t_start=0")
        fv = np.array([v for _, v in pts])
        values[:, f] = fv[np.searchsorted(ft, times, side="right") - 1]
    return BoundarySchedule(times, values)


def read_schedule_csv(path, n_faces=None):
    with open(path) as fh:
        return parse_schedule_csv(fh.read(), n_faces)


def write_plan(plan, path):
    with open(path, "w", newline="") as fh:
        for key, value in plan.header().items():
            fh.write(f"# {key}={value}\n")
        fh.write(schedule_to_csv(plan.schedule))


def read_plan_header(path):
    out = {}
    with open(path) as fh:
        for ln in fh:
            if not ln.startswith("#"):
                break
            key, value = ln[1:].strip().split("=", 1)
            out[key] = value
    return out
