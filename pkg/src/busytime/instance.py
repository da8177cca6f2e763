from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, Iterable, List, Literal, Optional, Protocol, Sequence, Tuple

from busytime.errors import InstanceError
from busytime.schedule import Batch


@dataclass(frozen=True, slots=True)
class JobSpec:
    id: int
    release: int
    deadline: int


@dataclass(frozen=True, slots=True)
class MachineType:
    capacity: int
    cost: Fraction


@dataclass(frozen=True)
class Instance:
    jobs: Tuple[JobSpec, ...]
    machine_types: Tuple[MachineType, ...]

    def __post_init__(self) -> None:
        if not self.machine_types:
            raise InstanceError("machine_types: empty machine list")
        for k, mt in enumerate(self.machine_types):
            if mt.capacity < 1:
                raise InstanceError(f"machine_types[{k}].capacity: {mt.capacity} < 1")
            if mt.cost < 1:
                raise InstanceError(f"machine_types[{k}].cost: {mt.cost} < 1")
        seen: set[int] = set()
        for pos, job in enumerate(self.jobs):
            if job.id < 0:
                raise InstanceError(f"jobs[{pos}].id: negative id {job.id}")
            if job.id in seen:
                raise InstanceError(f"jobs[{pos}].id: duplicate job id {job.id}")
            seen.add(job.id)
            if job.release < 0:
                raise InstanceError(f"jobs[{pos}].release: job {job.id} released at {job.release} < 0")
            if job.deadline < job.release:
                raise InstanceError(
                    f"jobs[{pos}].deadline: job {job.id} has deadline {job.deadline} < release {job.release}"
                )

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def horizon(self) -> int:
        return max((j.deadline for j in self.jobs), default=0)

    @cached_property
    def job_index(self) -> Dict[int, JobSpec]:
        return {j.id: j for j in self.jobs}

    def canonical(self) -> "Instance":
        types = canonicalize_types(self.machine_types)
        if types == self.machine_types:
            return self
        return Instance(jobs=self.jobs, machine_types=types)

    def with_machine_types(self, machine_types: Sequence[MachineType]) -> "Instance":
        return Instance(jobs=self.jobs, machine_types=tuple(machine_types))


def canonicalize_types(machine_types: Sequence[MachineType]) -> Tuple[MachineType, ...]:
    """Drop dominated machine types.

    Result is sorted by capacity with capacities and costs both strictly increasing.
    """
    cheapest: Dict[int, MachineType] = {}
    for mt in machine_types:
        cur = cheapest.get(mt.capacity)
        if cur is None or mt.cost < cur.cost:
            cheapest[mt.capacity] = mt

    kept: List[MachineType] = []
    floor: Optional[Fraction] = None
    for capacity in sorted(cheapest, reverse=True):
        mt = cheapest[capacity]
        if floor is not None and mt.cost >= floor:
            continue
        kept.append(mt)
        floor = mt.cost
    kept.reverse()
    return tuple(kept)


def is_agreeable(instance: Instance) -> bool:
    """True iff no later-released job has an earlier deadline (equal releases are free)."""
    jobs = sorted(instance.jobs, key=lambda j: (j.release, j.deadline))
    max_before = None
    i = 0
    while i < len(jobs):
        release = jobs[i].release
        group_min = jobs[i].deadline
        group_max = group_min
        i += 1
        while i < len(jobs) and jobs[i].release == release:
            group_max = jobs[i].deadline
            i += 1
        if max_before is not None and group_min < max_before:
            return False
        max_before = group_max if max_before is None else max(max_before, group_max)
    return True


# -----------------------
# Type systems
# -----------------------

class TypeSystem(Protocol):
    kind: Literal["real", "virtual"]

    @property
    def num_types(self) -> int: ...

    @property
    def real_types(self) -> Tuple[MachineType, ...]: ...

    def capacity(self, k: int) -> int: ...

    def cost(self, k: int) -> Fraction: ...

    def realize(self, k: int, exec_time: int, job_ids: Sequence[int]) -> List[Batch]: ...


@dataclass(frozen=True)
class RealTypes:
    machine_types: Tuple[MachineType, ...]
    kind: Literal["real", "virtual"] = field(default="real", init=False)

    @property
    def num_types(self) -> int:
        return len(self.machine_types)

    @property
    def real_types(self) -> Tuple[MachineType, ...]:
        return self.machine_types

    def capacity(self, k: int) -> int:
        return self.machine_types[k].capacity

    def cost(self, k: int) -> Fraction:
        return self.machine_types[k].cost

    def realize(self, k: int, exec_time: int, job_ids: Sequence[int]) -> List[Batch]:
        if len(job_ids) > self.capacity(k):
            raise InstanceError(f"type {k} holds {self.capacity(k)} jobs, got {len(job_ids)}")
        return [Batch(batch_type=k, exec_time=exec_time, job_ids=tuple(job_ids))]


@dataclass(frozen=True)
class Rung:
    k: int
    capacity: int
    # (real type index, copies), largest real capacity first
    realization: Tuple[Tuple[int, int], ...]


@dataclass(frozen=True)
class NormalizedLadder:
    """Power-of-two virtual machine types, each realized by real machines.

    Rung k costs 2^k (times `scale`, the cheapest real cost) and carries
    capacity at least twice rung k-1, so per-job cost never increases.
    """

    scale: Fraction
    rungs: Tuple[Rung, ...]
    real_types: Tuple[MachineType, ...]
    kind: Literal["real", "virtual"] = field(default="virtual", init=False)

    @property
    def num_types(self) -> int:
        return len(self.rungs)

    @property
    def max_rung(self) -> int:
        return len(self.rungs) - 1

    def capacity(self, k: int) -> int:
        return self.rungs[k].capacity

    def cost(self, k: int) -> Fraction:
        return self.scale * 2**k

    def realization_cost(self, k: int) -> Fraction:
        return sum(
            (self.real_types[idx].cost * copies for idx, copies in self.rungs[k].realization),
            Fraction(0),
        )

    def virtual_machine_types(self) -> Tuple[MachineType, ...]:
        return tuple(MachineType(capacity=r.capacity, cost=self.cost(r.k)) for r in self.rungs)

    def realize(self, k: int, exec_time: int, job_ids: Sequence[int]) -> List[Batch]:
        return realize_batch(self, k, job_ids, exec_time)


def _power_of_two_exponent(ratio: Fraction) -> int:
    # smallest p >= 0 with 2^p >= ratio
    return max(0, (math.ceil(ratio) - 1).bit_length())


def normalize_types(instance: Instance, n: Optional[int] = None) -> NormalizedLadder:
    types = instance.machine_types
    if canonicalize_types(types) != types:
        raise InstanceError("machine_types: normalize_types needs a canonical machine menu")
    bound = instance.n if n is None else n

    scale = types[0].cost
    by_power: Dict[int, int] = {}
    for idx, mt in enumerate(types):
        p = _power_of_two_exponent(mt.cost / scale)
        cur = by_power.get(p)
        if cur is None or mt.capacity > types[cur].capacity:
            by_power[p] = idx

    rungs: List[Rung] = [Rung(k=0, capacity=types[by_power[0]].capacity, realization=((by_power[0], 1),))]
    while rungs[-1].capacity <= bound:
        prev = rungs[-1]
        k = prev.k + 1
        doubled = 2 * prev.capacity
        real_idx = by_power.get(k)
        if real_idx is not None and types[real_idx].capacity >= doubled:
            rungs.append(Rung(k=k, capacity=types[real_idx].capacity, realization=((real_idx, 1),)))
        else:
            realization = tuple((idx, copies * 2) for idx, copies in prev.realization)
            rungs.append(Rung(k=k, capacity=doubled, realization=realization))

    return NormalizedLadder(scale=scale, rungs=tuple(rungs), real_types=types)


def realize_batch(
    ladder: NormalizedLadder,
    k: int,
    job_ids: Sequence[int],
    exec_time: int = 0,
) -> List[Batch]:
    """Spread one rung-k batch over its real machines, largest machine first.

    Machines left without jobs are not emitted: an idle machine is never busy.
    """
    rung = ladder.rungs[k]
    if len(job_ids) > rung.capacity:
        raise InstanceError(f"rung {k} holds {rung.capacity} jobs, got {len(job_ids)}")
    out: List[Batch] = []
    pos = 0
    for real_idx, copies in rung.realization:
        cap = ladder.real_types[real_idx].capacity
        for _ in range(copies):
            if pos >= len(job_ids):
                return out
            out.append(Batch(batch_type=real_idx, exec_time=exec_time, job_ids=tuple(job_ids[pos : pos + cap])))
            pos += cap
    return out


def make_jobs(windows: Iterable[Tuple[int, int]], first_id: int = 0) -> Tuple[JobSpec, ...]:
    return tuple(JobSpec(id=first_id + i, release=r, deadline=d) for i, (r, d) in enumerate(windows))


def make_types(pairs: Iterable[Tuple[int, object]]) -> Tuple[MachineType, ...]:
    """(capacity, cost) pairs; costs may be int, Fraction or "p/q" strings."""
    return tuple(MachineType(capacity=int(cap), cost=Fraction(str(cost))) for cap, cost in pairs)
