from __future__ import annotations

import random
from fractions import Fraction

import pytest

from busytime.errors import InstanceError
from busytime.instance import (
    Instance,
    JobSpec,
    MachineType,
    canonicalize_types,
    is_agreeable,
    make_jobs,
    make_types,
    normalize_types,
    realize_batch,
)


def _instance(windows, pairs) -> Instance:
    return Instance(jobs=make_jobs(windows), machine_types=make_types(pairs))


def test_minimal_instance_has_zero_horizon():
    inst = _instance([(0, 0)], [(1, 1)])
    assert inst.n == 1
    assert inst.horizon == 0


@pytest.mark.parametrize(
    "jobs, types, fragment",
    [
        ((JobSpec(0, 0, 1), JobSpec(0, 1, 2)), make_types([(1, 1)]), "duplicate job id 0"),
        ((JobSpec(7, 5, 3),), make_types([(1, 1)]), "job 7 has deadline 3 < release 5"),
        ((JobSpec(0, 0, 1),), (MachineType(0, Fraction(1)),), "capacity: 0 < 1"),
        ((JobSpec(0, 0, 1),), (), "empty machine list"),
        ((JobSpec(0, 0, 1),), (MachineType(1, Fraction(1, 2)),), "cost: 1/2 < 1"),
    ],
)
def test_invalid_instances_name_the_field(jobs, types, fragment):
    with pytest.raises(InstanceError) as err:
        Instance(jobs=jobs, machine_types=types)
    assert fragment in str(err.value)


def test_canonicalize_keeps_cheaper_duplicate():
    assert canonicalize_types(make_types([(5, 3), (5, 2)])) == make_types([(5, 2)])


def test_canonicalize_drops_dominated_small_type():
    assert canonicalize_types(make_types([(2, 4), (10, 3)])) == make_types([(10, 3)])


def test_canonicalize_leaves_canonical_menu_alone_and_is_idempotent():
    menu = make_types([(2, 1), (5, 2), (11, 4), (22, 8)])
    assert canonicalize_types(menu) == menu

    rng = random.Random(3)
    for _ in range(50):
        pairs = [(rng.randint(1, 20), rng.randint(1, 20)) for _ in range(rng.randint(1, 6))]
        once = canonicalize_types(make_types(pairs))
        assert canonicalize_types(once) == once
        caps = [m.capacity for m in once]
        costs = [m.cost for m in once]
        assert caps == sorted(set(caps))
        assert costs == sorted(set(costs))


def test_is_agreeable_examples():
    assert is_agreeable(_instance([(1, 2), (1, 3), (3, 4)], [(1, 1)]))
    assert not is_agreeable(_instance([(1, 5), (2, 3)], [(1, 1)]))
    # equal releases are unconstrained
    assert is_agreeable(_instance([(1, 5), (1, 3), (2, 5)], [(1, 1)]))


def test_is_agreeable_matches_pairwise_definition():
    rng = random.Random(11)
    for _ in range(200):
        windows = []
        for _ in range(rng.randint(1, 50)):
            r = rng.randint(0, 10)
            windows.append((r, r + rng.randint(0, 6)))
        inst = _instance(windows, [(1, 1)])
        pairwise = all(
            not (a.release < b.release) or a.deadline <= b.deadline for a in inst.jobs for b in inst.jobs
        )
        assert is_agreeable(inst) == pairwise


def test_normalize_rounds_costs_and_fills_gaps_by_doubling():
    inst = _instance([(0, 1)] * 10, [(2, 1), (5, 3), (11, 5)])
    ladder = normalize_types(inst)
    assert [r.capacity for r in ladder.rungs] == [2, 4, 8, 16]
    assert [r.realization for r in ladder.rungs] == [((0, 1),), ((0, 2),), ((0, 4),), ((0, 8),)]
    assert ladder.scale == 1


def test_normalize_mirrors_an_already_normalized_menu():
    inst = _instance([(0, 1)] * 12, [(1, 1), (3, 2), (8, 4), (20, 8)])
    ladder = normalize_types(inst)
    assert [r.capacity for r in ladder.rungs] == [1, 3, 8, 20]
    assert [r.realization for r in ladder.rungs] == [((0, 1),), ((1, 1),), ((2, 1),), ((3, 1),)]


def test_single_type_ladder_doubles_until_above_n():
    inst = _instance([(0, 1)] * 5, [(1, 1)])
    ladder = normalize_types(inst)
    assert [r.capacity for r in ladder.rungs] == [1, 2, 4, 8]
    assert [r.realization[0][1] for r in ladder.rungs] == [1, 2, 4, 8]


def test_normalize_honours_explicit_job_bound():
    inst = Instance(jobs=(), machine_types=make_types([(1, 1)]))
    assert normalize_types(inst, n=20).capacity(-1) == 32


def test_normalize_refuses_non_canonical_menu():
    inst = _instance([(0, 1)], [(2, 4), (10, 3)])
    with pytest.raises(InstanceError):
        normalize_types(inst)


def test_ladder_invariants_on_random_menus():
    rng = random.Random(5)
    for _ in range(100):
        pairs = [(rng.randint(1, 40), Fraction(rng.randint(4, 60), 4)) for _ in range(rng.randint(1, 5))]
        menu = canonicalize_types(make_types(pairs))
        n = rng.randint(1, 200)
        inst = Instance(jobs=make_jobs([(0, 1)] * n), machine_types=menu)
        ladder = normalize_types(inst)
        assert ladder.capacity(ladder.max_rung) > n
        for k, rung in enumerate(ladder.rungs):
            assert ladder.cost(k) == ladder.scale * 2**k
            assert ladder.realization_cost(k) <= ladder.cost(k)
            assert sum(menu[i].capacity * c for i, c in rung.realization) >= rung.capacity
            if k:
                assert rung.capacity >= 2 * ladder.capacity(k - 1)
                assert Fraction(2**k, rung.capacity) <= Fraction(2 ** (k - 1), ladder.capacity(k - 1))


def test_realize_batch_fills_machines_in_order():
    inst = _instance([(0, 1)] * 10, [(2, 1), (5, 3), (11, 5)])
    ladder = normalize_types(inst)
    batches = realize_batch(ladder, 2, list(range(7)), exec_time=4)
    assert [len(b.job_ids) for b in batches] == [2, 2, 2, 1]
    assert all(b.batch_type == 0 and b.exec_time == 4 for b in batches)
    assert sum(ladder.real_types[b.batch_type].cost for b in batches) == 4


def test_realize_batch_skips_idle_machines_and_rejects_overflow():
    inst = _instance([(0, 1)] * 10, [(2, 1)])
    ladder = normalize_types(inst)
    assert len(realize_batch(ladder, 2, [0, 1, 2])) == 2
    with pytest.raises(InstanceError):
        realize_batch(ladder, 1, list(range(5)))
