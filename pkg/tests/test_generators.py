from __future__ import annotations

from fractions import Fraction

import pytest

from busytime.errors import GeneratorRefusal, InstanceError
from busytime.generators import (
    MAX_GENERATED_JOBS,
    SEPARATION_VARIANTS,
    gen_random,
    separation_bound,
    separation_instance,
    separation_reference,
    separation_size,
    tight_example,
)
from busytime.instance import canonicalize_types, is_agreeable
from busytime.schedule import schedule_cost, validate_schedule


def test_gen_random_is_deterministic_per_seed():
    assert gen_random(n=20, K=3, window_max=4, seed=5) == gen_random(n=20, K=3, window_max=4, seed=5)
    assert gen_random(n=20, K=3, window_max=4, seed=5) != gen_random(n=20, K=3, window_max=4, seed=6)


def test_gen_random_shapes():
    for seed in range(40):
        inst = gen_random(n=15, K=4, window_max=3, seed=seed, release_max=6)
        assert inst.n == 15
        assert len(inst.machine_types) == 4
        assert canonicalize_types(inst.machine_types) == inst.machine_types
        assert all(0 <= j.release <= 6 and j.deadline - j.release <= 3 for j in inst.jobs)
        assert [j.id for j in inst.jobs] == list(range(15))


def test_agreeable_flag_yields_agreeable_instances():
    for seed in range(40):
        assert is_agreeable(gen_random(n=30, K=2, window_max=5, agreeable=True, seed=seed))


def test_ladder_menu_has_power_of_two_costs():
    for seed in range(20):
        menu = gen_random(n=5, K=4, window_max=2, seed=seed, ladder=True).machine_types
        assert [m.cost for m in menu] == [1, 2, 4, 8]
        assert all(b.capacity >= 2 * a.capacity for a, b in zip(menu, menu[1:]))


def test_gen_random_rejects_bad_sizes():
    with pytest.raises(InstanceError):
        gen_random(n=0, K=2, window_max=1)
    with pytest.raises(InstanceError):
        gen_random(n=3, K=2, window_max=-1)


@pytest.mark.parametrize("variant", SEPARATION_VARIANTS)
@pytest.mark.parametrize("K", [2, 4])
def test_separation_references_are_valid_and_match_the_bound(variant, K):
    inst = separation_instance(variant, K)
    assert inst.n == separation_size(variant, K)
    reference = separation_reference(variant, K, inst)
    assert validate_schedule(inst, reference) == []
    assert schedule_cost(reference) == separation_bound(variant, K)


def test_separation_families_refuse_oversized_or_odd_k():
    with pytest.raises(GeneratorRefusal) as err:
        separation_instance("greedy", 8)
    assert err.value.limit == MAX_GENERATED_JOBS
    assert err.value.size == 10**8
    with pytest.raises(InstanceError):
        separation_instance("lazy", 3)
    with pytest.raises(InstanceError):
        separation_instance("fifo", 2)


@pytest.mark.parametrize("q", [1, 2, 3, 4, 5])
def test_tight_example_sigma_and_cost(q):
    example = tight_example(q)
    assert example.sigma == 2 ** (2 * q + 3) - 2**q
    assert example.cost == (2**q + 1) * 2 ** (q + 1)
    assert example.cost / example.sigma <= Fraction(1, 4) + Fraction(4, 2**q)
    assert validate_schedule(example.instance, example.schedule) == []


def test_tight_example_needs_positive_q():
    with pytest.raises(InstanceError):
        tight_example(0)
