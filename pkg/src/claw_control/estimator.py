"""Estimator-style facade over certify / synthesize / evolve.

``fit`` learns a control plan from a target trajectory, ``predict`` steers an
initial state with it.
"""
import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ._validation import check_interval, check_state, check_trajectory
from .control import profile_at, synthesize
from .diagnostics import l1_distance
from .replacement import search_direction
from .solver import DEFAULT_CFL, FiniteVolumeSolver


class BoundaryController(BaseEstimator):
    """Steer any state valued in ``interval`` onto ``target(T2)`` at time ``T1``.

    Parameters
    ----------
    flux : Flux
    interval : (A, B)
    T1, T2 : float
        Both must exceed the certified horizon.
    b : float or None
        Constant held during the first phase when ``T1 > T2``.
    """

    def __init__(self, flux, interval, T1, T2, b=None, numerical_flux="auto",
                 cfl=DEFAULT_CFL, n_directions=64, snapshot_every=1, threads=1):
        self.flux = flux
        self.interval = interval
        self.T1 = T1
        self.T2 = T2
        self.b = b
        self.numerical_flux = numerical_flux
        self.cfl = cfl
        self.n_directions = n_directions
        self.snapshot_every = snapshot_every
        self.threads = threads

    def _solver(self):
        return FiniteVolumeSolver(self.flux, self.numerical_flux, self.cfl, self.threads)

    def fit(self, target):
        """``target`` is a Trajectory of v covering the window the plan reads."""
        target = check_trajectory(target)
        self.interval_ = check_interval(self.interval)
        self.certificate_ = search_direction(self.flux, self.interval_, target.grid.domain,
                                             self.n_directions)
        self.plan_ = synthesize(target, self.T1, self.T2, self.certificate_, self.b)
        self.target_profile_ = profile_at(target, float(self.T2))
        self.grid_ = target.grid
        return self

    def predict(self, initial):
        """Controlled state at ``T1``; the full run is kept in ``trajectory_``."""
        check_is_fitted(self, "plan_")
        initial = check_state(initial, self.grid_)
        stops = ()
        if self.plan_.case == "T1>T2":
            stops = (self.plan_.T1 - self.certificate_.t_star,)
        self.trajectory_ = self._solver().evolve(initial, self.plan_.schedule, self.plan_.T1,
                                                 self.snapshot_every, self.interval_, stops)
        return self.trajectory_.final

    def score(self, initial):
        """Negative L1 mismatch with the target profile (higher is better)."""
        final = self.predict(initial)
        return -l1_distance(final, self.target_profile_)

    @property
    def horizon_(self):
        check_is_fitted(self, "certificate_")
        return float(self.certificate_.t_star)

    def schedule_at(self, t):
        check_is_fitted(self, "plan_")
        return np.array(self.plan_.schedule.at(float(t)))
