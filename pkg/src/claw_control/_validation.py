"""Argument checks shared by the estimator facade."""
import numpy as np

from .exceptions import GridMismatch, InvalidDirection, InvalidInterval
from .solver import State, Trajectory


def check_interval(interval):
    try:
        a, b = (float(x) for x in interval)
    except (TypeError, ValueError):
        raise InvalidInterval(f"interval must be a pair of numbers, got {interval!r}") from None
    if not (np.isfinite(a) and np.isfinite(b) and a < b):
        raise InvalidInterval(f"need finite A < B, got [{a}, {b}]")
    return a, b


def check_direction(w, dim):
    w = np.atleast_1d(np.asarray(w, dtype=float))
    if w.shape != (dim,) or not np.all(np.isfinite(w)):
        raise InvalidDirection(f"direction must be a finite {dim}-vector")
    norm = np.linalg.norm(w)
    if norm == 0.0:
        raise InvalidDirection("direction must be nonzero")
    return w / norm


def check_state(state, grid=None):
    if not isinstance(state, State):
        raise TypeError(f"expected a State, got {type(state).__name__}")
    if grid is not None and state.grid != grid:
        raise GridMismatch("state lives on a different grid")
    return state


def check_trajectory(traj):
    if not isinstance(traj, Trajectory):
        raise TypeError(f"expected a Trajectory, got {type(traj).__name__}")
    return traj
