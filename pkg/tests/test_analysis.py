from __future__ import annotations

from fractions import Fraction

import pytest

from busytime.algorithms import GreedyAgreeable, LedgerEntry
from busytime.analysis import (
    IntervalTuple,
    check_escalation,
    check_valid_assignment,
    credit_audit,
    overlap_depth,
    sigma,
)
from busytime.engine import DispatchRecord, DispatchTrace, StaticSource, run_online
from busytime.errors import CreditAuditError, ScheduleError
from busytime.generators import gen_random, tight_example
from busytime.instance import Instance, RealTypes, make_jobs, make_types
from busytime.schedule import Batch, Schedule

MENU = make_types([(1, 1), (3, 2), (8, 4)])


def _rules(inst, assignment):
    return {(v.batch_index, v.rule) for v in check_valid_assignment(inst, assignment, RealTypes(MENU))}


def test_each_validity_rule_is_reported():
    inst = Instance(jobs=make_jobs([(0, 1), (2, 3), (0, 5), (3, 4)]), machine_types=MENU)

    assert _rules(inst, [IntervalTuple(0, 5, 2, (2,))]) == {(0, "size")}
    assert _rules(inst, [IntervalTuple(0, 1, 0, (1,))]) == {(0, "containment")}
    assert _rules(inst, [IntervalTuple(0, 3, 0, (0,)), IntervalTuple(3, 4, 0, (3,))]) == {(1, "disjoint")}
    assert _rules(inst, [IntervalTuple(0, 1, 0, (0,)), IntervalTuple(0, 5, 1, (0,))]) == {(1, "unique")}


def test_valid_assignment_and_sigma():
    inst = Instance(jobs=make_jobs([(0, 1), (2, 3), (0, 5), (3, 4)]), machine_types=MENU)
    assignment = [
        IntervalTuple(0, 1, 0, (0,)),
        IntervalTuple(2, 3, 0, (1,)),
        IntervalTuple(0, 5, 1, (2,)),
    ]
    assert check_valid_assignment(inst, assignment, RealTypes(MENU)) == []
    assert sigma(assignment) == 4
    assert sigma([]) == 0


def test_unknown_type_or_job_raises():
    inst = Instance(jobs=make_jobs([(0, 1)]), machine_types=MENU)
    with pytest.raises(ScheduleError):
        check_valid_assignment(inst, [IntervalTuple(0, 1, 9, (0,))], RealTypes(MENU))
    with pytest.raises(ScheduleError):
        check_valid_assignment(inst, [IntervalTuple(0, 1, 0, (5,))], RealTypes(MENU))


def test_tight_example_sigma_at_q3():
    example = tight_example(3)
    assert example.sigma == 504
    assert example.cost == 144


def test_credit_audit_single_batch():
    menu = make_types([(1, 1)])
    inst = Instance(jobs=make_jobs([(0, 2)]), machine_types=menu)
    opt = Schedule(batches=(Batch(0, 2, (0,)),), type_system=RealTypes(menu))
    report = credit_audit(inst, opt, [IntervalTuple(0, 2, 0, (0,))], RealTypes(menu))
    assert report.distributed == 1
    assert report.opt_units == 1
    assert [c.received for c in report.intervals] == [Fraction(1)]


def test_credit_audit_on_the_tight_example():
    example = tight_example(2)
    types = RealTypes(example.instance.machine_types)
    report = credit_audit(example.instance, example.schedule, example.assignment, types)
    # four pair batches of 15 + 12 and a last batch of 16
    assert report.distributed == 4 * 27 + 16
    assert report.opt_units == 40
    assert all(c.received >= c.required for c in report.intervals)


def test_credit_audit_names_the_failed_claim():
    menu = make_types([(1, 1)])
    inst = Instance(jobs=make_jobs([(0, 2), (0, 2)]), machine_types=menu)
    opt = Schedule(batches=(Batch(0, 2, (0,)), Batch(0, 2, (1,))), type_system=RealTypes(menu))
    with pytest.raises(CreditAuditError) as err:
        credit_audit(inst, opt, [IntervalTuple(0, 2, 0, (0, 1))], RealTypes(menu))
    assert err.value.claim == "assignment valid"

    broken = Schedule(batches=(Batch(0, 2, (0,)),), type_system=RealTypes(menu))
    with pytest.raises(CreditAuditError) as err:
        credit_audit(inst, broken, [IntervalTuple(0, 2, 0, (0,))], RealTypes(menu))
    assert err.value.claim == "optimum schedule valid"


def test_overlap_depth_examples():
    inst = Instance(jobs=make_jobs([(0, 3)]), machine_types=MENU)
    types = RealTypes(MENU)
    result = run_online(StaticSource(inst), GreedyAgreeable(types), types)
    assert overlap_depth(result.trace, inst) == 1

    for seed in range(50):
        inst = gen_random(n=30, K=3, window_max=5, agreeable=True, seed=seed)
        types = RealTypes(inst.machine_types)
        result = run_online(StaticSource(inst), GreedyAgreeable(types), types)
        assert overlap_depth(result.trace, inst) <= 2


def test_escalation_needs_a_full_earlier_batch_due_in_the_interval():
    inst = Instance(jobs=make_jobs([(0, 1), (2, 3), (0, 5), (3, 4)]), machine_types=MENU)
    types = RealTypes(MENU)
    trace = DispatchTrace(types)
    trace.append(DispatchRecord(exec_time=1, batch_type=1, job_ids=(0, 2), critical=0))
    ledger = [
        LedgerEntry(left=0, right=1, batch_type=0, charged=(0,)),
        LedgerEntry(left=0, right=3, batch_type=1, charged=(1,)),
        LedgerEntry(left=0, right=3, batch_type=2, charged=(2,), escalated_from=0),
    ]
    violations = check_escalation(inst, trace, ledger, types)
    assert [(v.batch_index, v.rule) for v in violations] == [(1, "escalation"), (2, "escalation"), (2, "escalation")]
    assert "without a source batch" in violations[0].detail
    assert "holds 2 of 3" in violations[1].detail
    assert "due after 3: [2]" in violations[2].detail

    ledger[2] = LedgerEntry(left=0, right=5, batch_type=2, charged=(2,), escalated_from=0)
    assert [v.detail for v in check_escalation(inst, trace, ledger[2:], types)] == ["source batch 0 holds 2 of 3"]
