import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from claw_control import BoundarySchedule, BoxDomain, Flux, FiniteVolumeSolver, State, build_grid
from claw_control.diagnostics import cell_entropy_residual, mass_balance_residual, positive_part_sum
from claw_control.exceptions import CflViolation, DegenerateDynamics, InvalidInterval, NumericalBlowup


def test_max_stable_dt_examples():
    s = FiniteVolumeSolver(Flux.burgers())
    assert s.max_stable_dt((1, 2), build_grid(BoxDomain.unit(1), 100)) == pytest.approx(0.00225)
    s2 = FiniteVolumeSolver(Flux.diagonal_burgers(2))
    assert s2.max_stable_dt((1, 2), build_grid(BoxDomain.unit(2), (100, 100))) == pytest.approx(0.001125)


def test_zero_flux_is_degenerate():
    g = build_grid(BoxDomain.unit(1), 10)
    s = FiniteVolumeSolver(Flux.affine(0.0))
    assert math.isinf(s.max_stable_dt((0, 1), g))
    with pytest.raises(DegenerateDynamics):
        s.evolve(State.constant(g, 0.5), BoundarySchedule.for_grid(g, 0.5), 1.0)


def test_constant_state_is_stationary():
    g = build_grid(BoxDomain.unit(2), (20, 30))
    s = FiniteVolumeSolver(Flux.skew(2))
    u = State.constant(g, 1.37)
    new = s.step(u, BoundarySchedule.for_grid(g, 1.37), 0.5 * s.max_stable_dt((1.37, 1.37), g))
    assert np.max(np.abs(new.values - 1.37)) <= 1e-15
    traj = s.evolve(u, BoundarySchedule.for_grid(g, 1.37), 0.3)
    assert np.max(np.abs(traj.final.values - 1.37)) <= 1e-14


def test_unattainable_left_datum_is_ignored():
    g = build_grid(BoxDomain.unit(1), 200)
    s = FiniteVolumeSolver(Flux.burgers())
    sched = BoundarySchedule(np.array([0.0]), np.array([[-0.5, -1.0]]))
    u = State.constant(g, -1.0)
    new = s.step(u, sched, s.max_stable_dt((-1, -0.5), g))
    assert np.all(new.values == -1.0)


def test_shock_speed():
    g = build_grid(BoxDomain.unit(1), 400)
    s = FiniteVolumeSolver(Flux.burgers())
    u0 = State.from_function(g, lambda x: np.where(x < 0.5, 1.0, 0.0))
    sched = BoundarySchedule(np.array([0.0]), np.array([[1.0, 0.0]]))
    final = s.evolve(u0, sched, 0.5).final
    x = g.axis_centers[0]
    # first cell below the midpoint value 1/2
    j = int(np.argmax(final.values < 0.5))
    front = 0.5 * (x[j - 1] + x[j])
    assert abs(front - 0.75) <= 2 * g.dx[0]


def test_cfl_violation():
    g = build_grid(BoxDomain.unit(1), 50)
    s = FiniteVolumeSolver(Flux.burgers())
    u = State.constant(g, 2.0)
    sched = BoundarySchedule.for_grid(g, 1.0)
    bound = s.max_stable_dt((1, 2), g)
    s.step(u, sched, bound + 5e-13)
    with pytest.raises(CflViolation):
        s.step(u, sched, bound * 1.01)


def test_data_outside_interval():
    g = build_grid(BoxDomain.unit(1), 20)
    s = FiniteVolumeSolver(Flux.burgers())
    with pytest.raises(InvalidInterval):
        s.evolve(State.constant(g, 2.5), BoundarySchedule.for_grid(g, 1.5), 0.1, interval=(1, 2))


def test_zero_length_run():
    g = build_grid(BoxDomain.unit(1), 20)
    traj = FiniteVolumeSolver(Flux.burgers()).evolve(State.constant(g, 1.0),
                                                     BoundarySchedule.for_grid(g, 1.0), 0.0)
    assert len(traj.snapshots) == 1


def test_stops_and_snapshots_land_exactly():
    g = build_grid(BoxDomain.unit(1), 50)
    s = FiniteVolumeSolver(Flux.burgers())
    traj = s.evolve(State.constant(g, 1.5), BoundarySchedule.for_grid(g, 1.2), 0.7,
                    snapshot_every=7, stops=(0.3141,))
    times = traj.times
    assert times[0] == 0.0 and times[-1] == 0.7
    assert 0.3141 in times
    assert np.all(np.diff(times) > 0)
    assert len(traj.dts) == len(traj.step_times) == len(traj.boundary_flux)
    assert math.fsum(traj.dts) == pytest.approx(0.7, abs=1e-14)


def test_state_rejects_non_finite():
    g = build_grid(BoxDomain.unit(1), 4)
    with pytest.raises(NumericalBlowup):
        State(g, [1, np.nan, 1, 1])


def test_schedule_validation():
    with pytest.raises(ValueError):
        BoundarySchedule([0.1], [[1.0]])
    with pytest.raises(ValueError):
        BoundarySchedule([0.0, 1.0, 1.0], [[1.0], [1.0], [2.0]])
    sched = BoundarySchedule([0.0, 1.0], [[1.0, 2.0], [3.0, 4.0]])
    assert list(sched.at(0.999)) == [1.0, 2.0]
    assert list(sched.at(1.0)) == [3.0, 4.0]
    assert list(sched.at(50.0)) == [3.0, 4.0]


def test_mass_balance_with_inflow_outflow(rng):
    g = build_grid(BoxDomain((0, 0), (2, 1)), (40, 25))
    s = FiniteVolumeSolver(Flux.skew(2))
    u0 = State(g, rng.uniform(1, 2, g.shape))
    sched = BoundarySchedule(np.linspace(0, 0.2, 5), rng.uniform(1, 2, (5, g.n_faces)))
    traj = s.evolve(u0, sched, 0.3, interval=(1, 2))
    assert mass_balance_residual(traj) <= 1e-10


def test_threads_do_not_change_results(rng):
    g = build_grid(BoxDomain.unit(2), (37, 23))
    u0 = State(g, rng.uniform(1, 2, g.shape))
    sched = BoundarySchedule.for_grid(g, 1.5)
    runs = [FiniteVolumeSolver(Flux.skew(2), threads=t).evolve(u0, sched, 0.05, interval=(1, 2))
            for t in (1, 3, 8)]
    for r in runs[1:]:
        assert np.array_equal(r.final.values, runs[0].final.values)
        assert r.boundary_flux == runs[0].boundary_flux


def test_engquist_osher_option_is_also_monotone(rng):
    g = build_grid(BoxDomain.unit(1), 60)
    s = FiniteVolumeSolver(Flux.cubic(), numerical_flux="engquist-osher")
    u0 = State(g, rng.uniform(-1, 1, g.shape))
    traj = s.evolve(u0, BoundarySchedule.for_grid(g, 0.2), 0.2, interval=(-1, 1))
    for snap in traj.snapshots:
        lo, hi = snap.range
        assert lo >= -1 - 1e-12 and hi <= 1 + 1e-12


def test_unknown_numerical_flux():
    g = build_grid(BoxDomain.unit(1), 10)
    with pytest.raises(ValueError):
        FiniteVolumeSolver(Flux.burgers(), numerical_flux="roe").step(
            State.constant(g, 1.0), BoundarySchedule.for_grid(g, 1.0), 1e-3)


def test_estimator_params():
    s = FiniteVolumeSolver(Flux.burgers(), cfl=0.3)
    assert s.get_params()["cfl"] == 0.3
    assert s.set_params(threads=4).threads == 4


flux_choice = st.sampled_from(["burgers", "cubic"])


@given(seed=st.integers(0, 2**32 - 1), name=flux_choice, method=st.sampled_from(["godunov", "engquist-osher"]))
@settings(max_examples=25, deadline=None)
def test_monotone_scheme_properties(seed, name, method):
    # maximum principle, L1 comparison and cell entropy inequality on a random step
    r = np.random.default_rng(seed)
    g = build_grid(BoxDomain.unit(1), 30)
    s = FiniteVolumeSolver(Flux.builtin(name), numerical_flux=method)
    a, b = -1.0, 1.5
    u = State(g, r.uniform(a, b, g.shape))
    v = State(g, r.uniform(a, b, g.shape))
    sched = BoundarySchedule([0.0], r.uniform(a, b, (1, g.n_faces)))
    dt = s.max_stable_dt((a, b), g)
    nu, nv = s.step(u, sched, dt), s.step(v, sched, dt)
    assert nu.range[0] >= a - 1e-12 and nu.range[1] <= b + 1e-12
    assert positive_part_sum(nu, nv) <= positive_part_sum(u, v) + 1e-12
    for k in np.linspace(a, b, 5):
        assert cell_entropy_residual(s, u, sched, dt, k).max() <= 1e-12


def test_no_sliver_step_at_the_end():
    g = build_grid(BoxDomain.unit(1), 400)
    s = FiniteVolumeSolver(Flux.burgers())
    dt = s.max_stable_dt((1, 2), g)
    traj = s.evolve(State.constant(g, 1.5), BoundarySchedule.for_grid(g, 1.5), 200 * dt,
                    interval=(1, 2))
    assert len(traj.dts) == 200
    assert min(traj.dts) >= dt * (1 - 1e-12)
