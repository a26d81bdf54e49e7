"""Explicit first-order monotone finite-volume solver with boundary ghosts.

Every boundary face carries a ghost value equal to the scheduled datum; the
face flux is the monotone numerical flux between ghost and interior, so a
datum is only felt where the boundary Riemann problem lets waves enter.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from .exceptions import (CflViolation, DegenerateDynamics, GridMismatch,
                         InvalidInterval, NumericalBlowup)
from .flux import NUMERICAL_FLUXES

DEFAULT_CFL = 0.45
CFL_SLACK = 1e-12
RANGE_SLACK = 1e-12
# remainders this close to dt_max are landed in one step instead of leaving a sliver
LANDING_SLACK = 1e-13


@dataclass(frozen=True, eq=False)
class State:
    grid: object
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        v = np.array(self.values, dtype=float).reshape(self.grid.shape)
        if not np.all(np.isfinite(v)):
            raise NumericalBlowup("state contains non-finite values")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "t", float(self.t))

    @classmethod
    def from_function(cls, grid, func, t=0.0):
        """Sample ``func`` at cell centers; ``func`` gets ``d`` coordinate arrays."""
        x = np.moveaxis(grid.centers, -1, 0)
        return cls(grid, np.broadcast_to(func(*x), grid.shape), t)

    @classmethod
    def constant(cls, grid, value, t=0.0):
        return cls(grid, np.full(grid.shape, float(value)), t)

    @property
    def range(self):
        return float(self.values.min()), float(self.values.max())

    def mass(self):
        return math.fsum(self.values.ravel()) * self.grid.cell_volume

    def with_time(self, t):
        return State(self.grid, self.values, t)


@dataclass(frozen=True, eq=False)
class BoundarySchedule:
    """Piecewise-constant boundary data shared breakpoints, one column per face.

    ``values[j]`` applies on ``[times[j], times[j+1])``; the last row is
    extended for ``t >= times[-1]``.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.array(self.times, dtype=float).ravel()
        values = np.array(self.values, dtype=float)
        if values.ndim == 1:
            values = values[:, None]
        if times.size == 0 or times[0] != 0.0:
            raise ValueError("schedule must start at t = 0")
        if np.any(np.diff(times) <= 0.0):
            raise ValueError("schedule breakpoints must be strictly increasing")
        if values.shape[0] != times.size:
            raise ValueError("one value row per breakpoint")
        if not np.all(np.isfinite(values)) or not np.all(np.isfinite(times)):
            raise ValueError("schedule values must be finite")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @classmethod
    def constant(cls, n_faces, value):
        return cls(np.array([0.0]), np.full((1, n_faces), float(value)))

    @classmethod
    def for_grid(cls, grid, value):
        return cls.constant(grid.n_faces, value)

    @property
    def n_faces(self):
        return self.values.shape[1]

    def segment(self, t):
        if t < 0.0:
            raise ValueError("schedule undefined for t < 0")
        return int(np.searchsorted(self.times, t, side="right")) - 1

    def at(self, t):
        return self.values[self.segment(t)]

    @property
    def range(self):
        return float(self.values.min()), float(self.values.max())

    def same_as(self, other):
        return self is other or (np.array_equal(self.times, other.times)
                                 and np.array_equal(self.values, other.values))


@dataclass(eq=False)
class Trajectory:
    snapshots: list
    schedule: BoundarySchedule
    step_times: list = field(default_factory=list)
    dts: list = field(default_factory=list)
    boundary_flux: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def grid(self):
        return self.snapshots[0].grid

    @property
    def times(self):
        return np.array([s.t for s in self.snapshots])

    @property
    def initial(self):
        return self.snapshots[0]

    @property
    def final(self):
        return self.snapshots[-1]

    def window(self, t0, t1, tol=1e-9):
        """Sub-trajectory between two snapshot times."""
        times = self.times
        i0 = np.nonzero(np.abs(times - t0) <= tol)[0]
        i1 = np.nonzero(np.abs(times - t1) <= tol)[0]
        if not i0.size or not i1.size:
            raise GridMismatch(f"window [{t0}, {t1}] not aligned with snapshots")
        snaps = self.snapshots[i0[0]:i1[-1] + 1]
        lo, hi = snaps[0].t, snaps[-1].t
        keep = [k for k, s in enumerate(self.step_times) if lo <= s < hi]
        return Trajectory(snaps, self.schedule,
                          [self.step_times[k] for k in keep],
                          [self.dts[k] for k in keep],
                          [self.boundary_flux[k] for k in keep],
                          dict(self.metadata))


def _hull(*ranges):
    return min(r[0] for r in ranges), max(r[1] for r in ranges)


class FiniteVolumeSolver(BaseEstimator):
    """Unsplit first-order monotone scheme on a box grid.

    Parameters
    ----------
    flux : Flux
    numerical_flux : {"auto", "godunov", "engquist-osher"}
        ``auto`` picks Godunov for builtin fluxes, Engquist-Osher otherwise.
    cfl : float
    threads : int
        Worker threads for face-flux evaluation. Results do not depend on it.
    """

    def __init__(self, flux, numerical_flux="auto", cfl=DEFAULT_CFL, threads=1):
        self.flux = flux
        self.numerical_flux = numerical_flux
        self.cfl = cfl
        self.threads = threads

    def _method(self):
        name = self.numerical_flux
        if name == "auto":
            name = self.flux.default_numerical_flux
        if name not in NUMERICAL_FLUXES:
            raise ValueError(f"unknown numerical flux {name!r}")
        return NUMERICAL_FLUXES[name]

    def _check_grid(self, grid):
        if grid.dimension != self.flux.dimension:
            raise GridMismatch(
                f"flux has {self.flux.dimension} components, grid has dimension {grid.dimension}")

    def max_stable_dt(self, interval, grid):
        a, b = (float(x) for x in interval)
        self._check_grid(grid)
        rate = sum(c.max_abs_derivative(a, b) / h for c, h in zip(self.flux.components, grid.dx))
        if rate == 0.0:
            return math.inf
        return self.cfl / rate

    def face_states(self, values, ghosts, axis):
        """Left/right states at every face normal to ``axis`` (ghosts padded)."""
        grid_shape = values.shape
        lo = np.broadcast_to(ghosts[0], grid_shape[:axis] + (1,) + grid_shape[axis + 1:])
        hi = np.broadcast_to(ghosts[1], lo.shape)
        padded = np.concatenate([lo, values, hi], axis=axis)
        n = padded.shape[axis]
        left = np.take(padded, np.arange(n - 1), axis=axis)
        right = np.take(padded, np.arange(1, n), axis=axis)
        return left, right

    def ghost_pair(self, grid, face_values, axis):
        return grid.ghost_slab(face_values, axis, 0), grid.ghost_slab(face_values, axis, 1)

    def face_fluxes(self, component, left, right, pool=None, method=None):
        method = method or self._method()
        lo = min(left.min(), right.min())
        hi = max(left.max(), right.max())
        critical = component.critical_points(lo, hi)
        func = getattr(component, method)
        if pool is None or left.shape[0] < 2:
            return func(left, right, critical=critical)
        chunks = np.array_split(np.arange(left.shape[0]), min(self.threads, left.shape[0]))
        parts = pool.map(lambda idx: func(left[idx], right[idx], critical=critical), chunks)
        return np.concatenate(list(parts), axis=0)

    def _advance(self, state, schedule, dt, pool=None):
        grid = state.grid
        self._check_grid(grid)
        if schedule.n_faces != grid.n_faces:
            raise GridMismatch("schedule and grid disagree on the number of boundary faces")
        ghosts_all = schedule.at(state.t)
        bound = self.max_stable_dt(_hull(state.range, (ghosts_all.min(), ghosts_all.max())), grid)
        if dt - bound > CFL_SLACK:
            raise CflViolation(f"dt={dt!r} exceeds the stable bound {bound!r}")
        method = self._method()
        u = state.values
        update = np.zeros(grid.shape)
        outward = np.empty(grid.n_faces)
        for axis, (comp, h) in enumerate(zip(self.flux.components, grid.dx)):
            left, right = self.face_states(u, self.ghost_pair(grid, ghosts_all, axis), axis)
            F = self.face_fluxes(comp, left, right, pool, method)
            n = F.shape[axis]
            update = update + (np.take(F, np.arange(1, n), axis=axis)
                               - np.take(F, np.arange(n - 1), axis=axis)) / h
            for ax, side, a, b in grid.face_blocks():
                if ax == axis:
                    slab = np.take(F, n - 1 if side else 0, axis=axis).ravel()
                    outward[a:b] = slab if side else -slab
        new = u - dt * update
        if not np.all(np.isfinite(new)):
            raise NumericalBlowup(f"non-finite values after step at t={state.t}")
        flux_total = math.fsum(outward * grid.face_areas)
        return State(grid, new, state.t + dt), flux_total

    def step(self, state, schedule, dt):
        return self._advance(state, schedule, float(dt))[0]

    def evolve(self, initial, schedule, t_end, snapshot_every=1, interval=None, stops=()):
        """March from ``initial.t`` to ``t_end``; intermediate ``stops`` are hit exactly.

        The step is ``max_stable_dt(interval)`` throughout, shortened only to
        land on a stop or on ``t_end``. ``interval`` defaults to the hull of
        the initial and scheduled values.
        """
        t0 = initial.t
        t_end = float(t_end)
        if t_end < t0:
            raise ValueError("t_end precedes the initial time")
        snapshot_every = int(snapshot_every)
        if snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")
        data = _hull(initial.range, schedule.range)
        if interval is None:
            interval = data
        a, b = (float(x) for x in interval)
        if data[0] < a - RANGE_SLACK or data[1] > b + RANGE_SLACK:
            raise InvalidInterval(f"data range {data} not inside declared interval [{a}, {b}]")
        dt_max = self.max_stable_dt((a, b), initial.grid)
        traj = Trajectory([initial], schedule, metadata={
            "flux": self.flux.name,
            "numerical_flux": self._method(),
            "cfl": self.cfl,
            "interval": (a, b),
            "dt_max": dt_max,
        })
        if t_end == t0:
            return traj
        if not math.isfinite(dt_max):
            raise DegenerateDynamics("flux derivative vanishes on the invariant interval")
        targets = sorted({float(s) for s in stops if t0 < s < t_end}) + [t_end]
        state, k, steps = initial, 0, 0
        pool = ThreadPoolExecutor(self.threads) if self.threads > 1 else None
        try:
            while k < len(targets):
                remaining = targets[k] - state.t
                landing = remaining <= dt_max + LANDING_SLACK
                dt = remaining if landing else dt_max
                t_start = state.t
                state, total = self._advance(state, schedule, dt, pool)
                if landing:
                    state = state.with_time(targets[k])
                    k += 1
                steps += 1
                traj.step_times.append(t_start)
                traj.dts.append(dt)
                traj.boundary_flux.append(total)
                if landing or steps % snapshot_every == 0:
                    traj.snapshots.append(state)
        finally:
            if pool is not None:
                pool.shutdown()
        return traj
