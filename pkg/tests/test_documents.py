from __future__ import annotations

import json
from fractions import Fraction

import pytest

from busytime.errors import InstanceError, ScheduleError
from busytime.documents import (
    RunReport,
    dump_instance,
    parse_cost,
    parse_instance,
    parse_intervals,
    read_instance,
    read_schedule,
    write_instance,
    write_ledger,
    write_schedule,
)
from busytime.analysis import IntervalTuple
from busytime.instance import Instance, make_jobs, make_types, normalize_types
from busytime.schedule import Batch, Schedule


def test_minimal_document():
    inst = parse_instance(
        '{"machine_types":[{"capacity":1,"cost":1}],"jobs":[{"id":0,"release":0,"deadline":0}]}'
    )
    assert inst.n == 1
    assert inst.horizon == 0


def test_menu_round_trips(tmp_path):
    inst = Instance(
        jobs=make_jobs([(3, 4), (0, 2), (0, 1)]),
        machine_types=make_types([(2, 1), (5, 2), (11, 4), (22, 8)]),
    )
    path = tmp_path / "inst.json"
    write_instance(inst, path)
    back = read_instance(path)
    assert back.machine_types == inst.machine_types
    assert sorted(back.jobs, key=lambda j: j.id) == sorted(inst.jobs, key=lambda j: j.id)

    doc = json.loads(path.read_text())
    assert list(doc) == ["machine_types", "jobs"]
    assert [(j["release"], j["id"]) for j in doc["jobs"]] == [(0, 1), (0, 2), (3, 0)]


@pytest.mark.parametrize(
    "raw, expected",
    [(2, Fraction(2)), ("3/2", Fraction(3, 2)), ("1.25", Fraction(5, 4)), (1.1, Fraction(11, 10))],
)
def test_cost_forms(raw, expected):
    assert parse_cost(raw) == expected


def test_rational_costs_written_as_strings():
    inst = Instance(jobs=(), machine_types=make_types([(1, "3/2"), (4, 2)]))
    doc = json.loads(dump_instance(inst))
    assert doc["machine_types"] == [{"capacity": 1, "cost": "3/2"}, {"capacity": 4, "cost": 2}]


def test_bad_documents_name_the_field():
    with pytest.raises(InstanceError) as err:
        parse_instance('{"machine_types":[{"capacity":1,"cost":"x"}],"jobs":[]}')
    assert "machine_types.0.cost" in str(err.value)

    with pytest.raises(InstanceError) as err:
        parse_instance(
            '{"machine_types":[{"capacity":1,"cost":1}],"jobs":[{"id":4,"release":5,"deadline":3}]}'
        )
    assert "job 4" in str(err.value)


def test_virtual_schedule_is_read_against_the_ladder(tmp_path):
    inst = Instance(jobs=make_jobs([(0, 2)] * 3), machine_types=make_types([(1, 1)]))
    sched = Schedule(batches=(Batch(2, 2, (0, 1, 2)),), type_system=normalize_types(inst))
    path = tmp_path / "s.json"
    write_schedule(sched, path)
    back = read_schedule(path, inst)
    assert back.kind == "virtual"
    assert back.batches == sched.batches
    assert back.type_system.capacity(2) == 4

    path.write_text('{"type_system":"imaginary","batches":[]}')
    with pytest.raises(ScheduleError):
        read_schedule(path, inst)


def test_ledger_and_assignment_keys_both_parse(tmp_path):
    rows = [IntervalTuple(left=0, right=5, batch_type=1, jobs=(1,))]
    path = tmp_path / "ledger.json"
    write_ledger(rows, path)
    assert json.loads(path.read_text()) == [{"left": 0, "right": 5, "type": 1, "charged": [1]}]
    assert parse_intervals(path.read_text()) == rows
    assert parse_intervals('[{"left":0,"right":5,"type":1,"jobs":[1]}]') == rows


def test_report_ratio_is_exact():
    row = RunReport.build(
        instance_id="x",
        algorithm="main",
        type_system="virtual",
        n=3,
        cost=Fraction(16),
        baseline="adversary_bound",
        baseline_value=Fraction(11),
        wall_time_ms=1.0,
        seed=0,
    )
    assert row.ratio == "16/11"
    assert row.exact_ratio() == Fraction(16, 11)

    bare = RunReport.build(
        instance_id="x", algorithm="lazy", type_system="real", n=3, cost=Fraction(3), wall_time_ms=1.0, seed=0
    )
    assert bare.baseline == "none"
    assert bare.ratio is None


def test_report_against_a_zero_baseline():
    row = RunReport.build(
        instance_id="empty",
        algorithm="main",
        type_system="virtual",
        n=0,
        cost=Fraction(0),
        baseline="exact_opt",
        baseline_value=Fraction(0),
        wall_time_ms=0.5,
        seed=0,
    )
    assert (row.baseline, row.baseline_value, row.ratio) == ("exact_opt", "0", "1")
    assert row.ratio_float == 1.0

    with pytest.raises(ScheduleError) as err:
        RunReport.build(
            instance_id="x",
            algorithm="lazy",
            type_system="real",
            n=1,
            cost=Fraction(2),
            baseline="exact_opt",
            baseline_value=Fraction(0),
            wall_time_ms=0.5,
            seed=0,
        )
    assert "zero exact_opt baseline" in str(err.value)
