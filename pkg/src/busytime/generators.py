from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

from busytime.analysis import IntervalTuple, check_valid_assignment, sigma
from busytime.errors import ConstructionError, GeneratorRefusal, InstanceError
from busytime.instance import Instance, JobSpec, MachineType, RealTypes, canonicalize_types
from busytime.schedule import Batch, Schedule, schedule_cost, validate_schedule

logger = logging.getLogger(__name__)

MAX_GENERATED_JOBS = 10**6

SEPARATION_VARIANTS: Tuple[str, ...] = ("greedy", "cost_efficient", "lazy", "ramp_up")


def _random_menu(rng: random.Random, K: int) -> List[MachineType]:
    cap = rng.randint(1, 3)
    cost = Fraction(rng.randint(4, 8), 4)
    menu = [MachineType(capacity=cap, cost=cost)]
    for _ in range(K - 1):
        cap += rng.randint(1, max(1, cap))
        cost += Fraction(rng.randint(1, 8), 4)
        menu.append(MachineType(capacity=cap, cost=cost))
    return menu


def _ladder_menu(rng: random.Random, K: int) -> List[MachineType]:
    # costs 2^k, capacity at least doubling
    cap = rng.randint(1, 3)
    menu = [MachineType(capacity=cap, cost=Fraction(1))]
    for k in range(1, K):
        cap = 2 * cap + rng.randint(0, cap)
        menu.append(MachineType(capacity=cap, cost=Fraction(2**k)))
    return menu


def gen_random(
    n: int,
    K: int,
    window_max: int,
    agreeable: bool = False,
    seed: int = 0,
    release_max: Optional[int] = None,
    ladder: bool = False,
) -> Instance:
    """Seeded random instance with a canonical K-type menu.

    `ladder=True` draws the menu as costs 2^k with doubling capacities.
    """
    if n < 1 or K < 1:
        raise InstanceError(f"gen_random needs n >= 1 and K >= 1, got n={n}, K={K}")
    if window_max < 0:
        raise InstanceError(f"window_max must be >= 0, got {window_max}")
    rng = random.Random(seed)
    menu = _ladder_menu(rng, K) if ladder else _random_menu(rng, K)
    top = n if release_max is None else release_max

    windows = []
    for _ in range(n):
        r = rng.randint(0, top)
        windows.append((r, r + rng.randint(0, window_max)))
    windows.sort()
    if agreeable:
        deadlines = sorted(d for _, d in windows)
        windows = [(r, d) for (r, _), d in zip(windows, deadlines)]

    jobs = tuple(JobSpec(id=i, release=r, deadline=d) for i, (r, d) in enumerate(windows))
    return Instance(jobs=jobs, machine_types=canonicalize_types(menu))


# -----------------------
# Separation families for the simple online rules
# -----------------------

def _power_menu(K: int) -> Tuple[MachineType, ...]:
    return tuple(MachineType(capacity=10**level, cost=Fraction(2**level)) for level in range(K + 1))


def separation_size(variant: str, K: int) -> int:
    half = 10 ** (K // 2)
    if variant in ("greedy", "cost_efficient"):
        return half * half
    if variant == "lazy":
        return half
    if variant == "ramp_up":
        repeats = 10 ** (K // 2 - 1)
        return repeats * (sum(10**level for level in range(1, K // 2 + 1)) + 1)
    raise InstanceError(f"unknown family variant: {variant}")


def ramp_up_period(K: int) -> int:
    return K + 4


def separation_instance(variant: str, K: int) -> Instance:
    """Instances on which each simple rule pays far more than the optimum.

    Menu: type l holds 10^l jobs and costs 2^l, for l = 0..K.
    """
    if K < 2 or K % 2:
        raise InstanceError(f"family needs an even K >= 2, got {K}")
    size = separation_size(variant, K)
    if size > MAX_GENERATED_JOBS:
        raise GeneratorRefusal(variant, size, MAX_GENERATED_JOBS)

    half = 10 ** (K // 2)
    windows: List[Tuple[int, int]] = []
    if variant in ("greedy", "cost_efficient"):
        late = 2 * half + 2
        for i in range(half):
            release = 2 * i + 1
            windows.append((release, release + 1))
            windows.extend([(release, late)] * (half - 1))
    elif variant == "lazy":
        windows = [(1, 2 + i) for i in range(half)]
    else:
        repeats = 10 ** (K // 2 - 1)
        period = ramp_up_period(K)
        late = repeats * period
        for rep in range(repeats):
            base = rep * period
            groups = [(base, 2)]
            groups += [(base + 2 * level + 1, 10**level) for level in range(1, K // 2)]
            groups.append((base + K + 1, half - 2))
            for release, count in groups:
                windows.append((release, release + 1))
                windows.extend([(release, late)] * (count - 1))
            flush = base + K + 3
            windows.append((flush, flush))

    jobs = tuple(JobSpec(id=i, release=r, deadline=d) for i, (r, d) in enumerate(windows))
    return Instance(jobs=jobs, machine_types=_power_menu(K))


def separation_reference(variant: str, K: int, instance: Optional[Instance] = None) -> Schedule:
    """A cheap offline schedule for the family instance, validated."""
    instance = instance or separation_instance(variant, K)
    types = RealTypes(instance.machine_types)
    batches: List[Batch] = []
    if variant == "lazy":
        batches.append(Batch(batch_type=K // 2, exec_time=2, job_ids=tuple(j.id for j in instance.jobs)))
    else:
        late = instance.horizon
        rest: List[int] = []
        for job in instance.jobs:
            if job.deadline == late:
                rest.append(job.id)
            else:
                batches.append(Batch(batch_type=0, exec_time=job.deadline, job_ids=(job.id,)))
        batches.sort(key=lambda b: b.exec_time)
        batches.append(Batch(batch_type=K, exec_time=late, job_ids=tuple(rest)))

    schedule = Schedule(batches=tuple(batches), type_system=types)
    problems = validate_schedule(instance, schedule)
    if problems:
        raise ConstructionError(f"{variant} reference schedule: {problems[0].rule}: {problems[0].detail}")
    return schedule


def separation_bound(variant: str, K: int) -> Fraction:
    """Closed-form cost of the reference schedule."""
    half = 10 ** (K // 2)
    if variant in ("greedy", "cost_efficient"):
        return Fraction(half + 2**K)
    if variant == "lazy":
        return Fraction(2 ** (K // 2))
    if variant == "ramp_up":
        return Fraction((2 + K // 2) * 10 ** (K // 2 - 1) + 2**K)
    raise InstanceError(f"unknown family variant: {variant}")


# -----------------------
# Tight lower-bound certificate
# -----------------------

@dataclass(frozen=True)
class TightExample:
    instance: Instance
    assignment: Tuple[IntervalTuple, ...]
    schedule: Schedule

    @property
    def sigma(self) -> int:
        return sigma(self.assignment)

    @property
    def cost(self) -> Fraction:
        return schedule_cost(self.schedule)


def tight_menu(q: int) -> Tuple[MachineType, ...]:
    return tuple(
        MachineType(capacity=2**k if k <= q else 2 ** (q + k), cost=Fraction(2**k)) for k in range(2 * q + 3)
    )


def tight_example(q: int) -> TightExample:
    """Valid interval assignment whose sigma is close to 4x a feasible schedule's cost.

    Slot pairs [2r, 2r+1], r = 1..2^q, each carry one interval of every type
    0..q+1; one wide interval of type 2q+2 spans everything. Each pair's jobs
    go into one type-(q+1) batch, the wide interval's jobs fill the spare room
    plus one last batch.
    """
    if q < 1:
        raise InstanceError(f"tight example needs q >= 1, got {q}")
    menu = tight_menu(q)
    types = RealTypes(menu)
    wide_right = 2 ** (q + 1) + 2
    wide_count = 2 ** (3 * q + 1)
    big = q + 1
    big_cap = menu[big].capacity

    jobs: List[JobSpec] = []
    assignment: List[IntervalTuple] = []
    pairs: List[List[int]] = []
    for r in range(1, 2**q + 1):
        ids: List[int] = []
        for s in range(q + 2):
            count = 1 if s == 0 else 2 ** (s - 1)
            group = [len(jobs) + i for i in range(count)]
            jobs.extend(JobSpec(id=j, release=2 * r, deadline=2 * r + 1) for j in group)
            assignment.append(IntervalTuple(left=2 * r, right=2 * r + 1, batch_type=s, jobs=tuple(group)))
            ids.extend(group)
        pairs.append(ids)

    wide = [len(jobs) + i for i in range(wide_count)]
    jobs.extend(JobSpec(id=j, release=0, deadline=wide_right) for j in wide)
    assignment.append(IntervalTuple(left=0, right=wide_right, batch_type=2 * q + 2, jobs=tuple(wide)))

    batches: List[Batch] = []
    pos = 0
    for r, ids in enumerate(pairs, start=1):
        spare = big_cap - len(ids)
        filler = wide[pos : pos + spare]
        pos += spare
        batches.append(Batch(batch_type=big, exec_time=2 * r + 1, job_ids=tuple(ids) + tuple(filler)))
    batches.append(Batch(batch_type=big, exec_time=wide_right, job_ids=tuple(wide[pos:])))

    instance = Instance(jobs=tuple(jobs), machine_types=menu)
    schedule = Schedule(batches=tuple(batches), type_system=types)
    problems = validate_schedule(instance, schedule)
    if problems:
        raise ConstructionError(f"tight schedule q={q}: {problems[0].rule}: {problems[0].detail}")
    bad = check_valid_assignment(instance, assignment, types)
    if bad:
        raise ConstructionError(f"tight assignment q={q}: {bad[0].rule}: {bad[0].detail}")
    logger.debug("tight example q=%s: %s jobs", q, instance.n)
    return TightExample(instance=instance, assignment=tuple(assignment), schedule=schedule)
