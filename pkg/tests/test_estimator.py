import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from claw_control import (BoundaryController, BoundarySchedule, BoxDomain, Flux, FiniteVolumeSolver,
                          State, build_grid)
from claw_control._validation import check_direction, check_interval, check_state
from claw_control.exceptions import GridMismatch, InvalidDirection, InvalidInterval


@pytest.fixture(scope="module")
def target():
    g = build_grid(BoxDomain.unit(1), 100)
    v0 = State.from_function(g, lambda x: 1.5 + 0.3 * np.sin(2 * np.pi * x))
    return FiniteVolumeSolver(Flux.burgers()).evolve(
        v0, BoundarySchedule.for_grid(g, 1.5), 2.5, interval=(1, 2), stops=(1.0, 1.5))


@pytest.mark.parametrize("T1,T2", [(1.5, 2.5), (2.5, 1.5)])
def test_fit_predict(target, T1, T2):
    est = BoundaryController(Flux.burgers(), (1, 2), T1, T2, b=1.5)
    assert est.fit(target) is est
    assert est.horizon_ == pytest.approx(1.0)
    u0 = State.from_function(target.grid, lambda x: 1.2 + 0.6 * x)
    final = est.predict(u0)
    assert final.t == T1
    assert est.score(u0) >= -0.05
    assert est.trajectory_.times[-1] == T1


def test_unfitted(target):
    est = BoundaryController(Flux.burgers(), (1, 2), 1.5, 2.5)
    with pytest.raises(NotFittedError):
        est.predict(target.initial)


def test_params_and_clone():
    est = BoundaryController(Flux.burgers(), (1, 2), 1.5, 2.5, threads=2)
    twin = clone(est)
    assert twin.get_params()["threads"] == 2
    assert twin.set_params(T1=3.0).T1 == 3.0


def test_predict_checks_grid(target):
    est = BoundaryController(Flux.burgers(), (1, 2), 1.5, 2.5).fit(target)
    other = State.constant(build_grid(BoxDomain.unit(1), 50), 1.5)
    with pytest.raises(GridMismatch):
        est.predict(other)


def test_validation_helpers():
    assert check_interval([1, 2]) == (1.0, 2.0)
    with pytest.raises(InvalidInterval):
        check_interval((2, 1))
    with pytest.raises(InvalidInterval):
        check_interval("ab")
    assert np.allclose(check_direction((3, 4), 2), (0.6, 0.8))
    with pytest.raises(InvalidDirection):
        check_direction((0, 0), 2)
    with pytest.raises(InvalidDirection):
        check_direction((1, 0, 0), 2)
    with pytest.raises(TypeError):
        check_state(np.ones(3))
