import os
from fractions import Fraction

import pytest

import morasim

DATA = os.environ.get("MORASIM_DATA_DIR", os.path.join(os.path.dirname(__file__), "..", "..", "data"))


def example():
    tasks = morasim.load_taskset(os.path.join(DATA, "example_taskset.json"))
    releases = morasim.load_actual_times(os.path.join(DATA, "example_actual.json"), tasks, 20)
    return tasks, releases


def test_energy_table():
    speeds = ["3/20", "0.4", "0.6", "0.8", 1]
    assert [morasim.energy(1, 1, s) for s in speeds] == [80, 170, 400, 900, 1600]
    assert morasim.quantize_speed(Fraction(1, 2)) == Fraction(3, 5)


def test_floats_are_refused():
    with pytest.raises(TypeError):
        morasim.energy(1, 1, 0.6)


def test_five_task_example():
    tasks, releases = example()
    r = morasim.simulate(tasks, releases, m=2, horizon=20)
    assert r["energy"] == 14625
    assert r["violations"] == []
    tau5 = sorted((iv["start"], iv["end"], iv["speed"], iv["proc"]) for iv in r["intervals"] if iv["task"] == 5)
    assert tau5 == [(2, 6, Fraction(3, 5), 2), (8, 14, Fraction(3, 5), 2)]
    assert r["completions"][(5, 1)] == 14
    assert r["gantt_svg"].startswith("<svg")


def test_max_reference():
    tasks, releases = example()
    r = morasim.simulate(tasks, releases, m=2, horizon=20, policy="max")
    assert r["energy"] == 26560
    assert r["offline_intervals"] == []


def test_deadline_miss_raises():
    tasks = [morasim.Task(1, 3, 4, 4), morasim.Task(2, 3, 4, 4)]
    with pytest.raises(morasim.DeadlineMissError):
        morasim.simulate(tasks, m=1, horizon=4, policy="max")
    r = morasim.simulate(tasks, m=1, horizon=4, policy="max", fail_fast=False)
    assert r["violations"][0][0] == "deadline"


def test_sizing_and_generation():
    tasks, _ = example()
    assert morasim.min_processors(tasks) == 3
    assert not morasim.density_test(tasks, 2)
    assert morasim.hyperperiod(tasks) == 12600
    gen = morasim.generate_taskset(band="1.0", d_max="0.4", seed=3)
    total = sum(Fraction(t.C) / Fraction(t.D) for t in gen)
    assert Fraction(1) <= total <= Fraction(21, 20)
    again = morasim.generate_taskset(band="1.0", d_max="0.4", seed=3)
    assert [t.C for t in gen] == [t.C for t in again]
    assert morasim.parse_taskset(morasim.taskset_to_json(gen))[0].C == gen[0].C


def test_bad_input():
    with pytest.raises(morasim.Error):
        morasim.parse_taskset('[{"id": 1, "C": 5, "D": 2, "T": 2}]')
    with pytest.raises(morasim.Error):
        morasim.load_taskset("/nonexistent/tasks.json")
