import numpy as np
import pytest

from claw_control import BoundarySchedule, BoxDomain, Flux, FiniteVolumeSolver, State, build_grid
from claw_control.diagnostics import final_match_report
from claw_control.exceptions import ParseError
from claw_control.io import (load_state, load_trajectory, parse_schedule_csv, read_schedule_csv,
                             save_state, save_trajectory, write_schedule_csv, write_state_csv)


def test_state_csv_round_trip(tmp_path, rng):
    g = build_grid(BoxDomain((0, -1), (2, 1)), (4, 3))
    s = State(g, rng.normal(size=g.shape))
    write_state_csv(s, tmp_path / "s.csv")
    back = load_state(tmp_path / "s.csv")
    assert back.grid == g
    assert np.array_equal(back.values, s.values)


def test_clg1_round_trip(tmp_path, rng):
    g = build_grid(BoxDomain.unit(3), (3, 4, 5))
    s = State(g, rng.normal(size=g.shape), t=0.25)
    save_state(s, tmp_path / "s.clg1")
    back = load_state(tmp_path / "s.clg1")
    assert back.t == 0.25 and np.array_equal(back.values, s.values)
    assert (tmp_path / "s.clg1").read_bytes().startswith(b"CLG1 3 3 4 5 ")


def test_trajectory_round_trip_keeps_final_match(tmp_path):
    g = build_grid(BoxDomain.unit(1), 50)
    u0 = State.from_function(g, lambda x: 1.5 + 0.3 * np.sin(2 * np.pi * x))
    traj = FiniteVolumeSolver(Flux.burgers()).evolve(u0, BoundarySchedule.for_grid(g, 1.5), 0.4, 3)
    save_trajectory(traj, tmp_path / "t.clg1")
    back = load_trajectory(tmp_path / "t.clg1")
    target = State.constant(g, 1.5)
    assert final_match_report(back, target, 0.4) == final_match_report(traj, target, 0.4)
    save_trajectory(traj, tmp_path / "sparse.clg1", every=4)
    sparse = load_trajectory(tmp_path / "sparse.clg1")
    assert sparse.times[-1] == traj.times[-1]


def test_schedule_csv_round_trip(tmp_path, rng):
    sched = BoundarySchedule([0.0, 0.1, 0.35], rng.uniform(1, 2, (3, 4)))
    write_schedule_csv(sched, tmp_path / "p.csv")
    back = read_schedule_csv(tmp_path / "p.csv")
    assert back.same_as(sched)


def test_schedule_csv_merges_face_breakpoints():
    text = "face_id,t_start,value\n0,0,1.0\n1,0,2.0\n0,0.5,1.5\n"
    sched = parse_schedule_csv(text)
    assert list(sched.times) == [0.0, 0.5]
    assert list(sched.at(0.7)) == [1.5, 2.0]


@pytest.mark.parametrize("text", [
    "face,t,value\n0,0,1\n",
    "face_id,t_start,value\n0,0.1,1\n",
    "face_id,t_start,value\n0,0,abc\n",
])
def test_schedule_csv_errors(text):
    with pytest.raises(ParseError):
        parse_schedule_csv(text)
