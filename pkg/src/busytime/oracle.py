from __future__ import annotations

import heapq
import logging
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from busytime.algorithms import OptimalBatches
from busytime.errors import ConstructionError, OracleLimitExceeded
from busytime.instance import Instance, MachineType, RealTypes, TypeSystem, canonicalize_types
from busytime.limits import OracleLimits
from busytime.schedule import Batch, Schedule, schedule_cost, validate_schedule

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class Placement:
    time: int
    batch_type: int


PlacementSet = Tuple[Placement, ...]


@dataclass(frozen=True)
class EdfResult:
    feasible: bool
    schedule: Optional[Schedule] = None
    missed_job: Optional[int] = None


def edf_feasible(
    instance: Instance,
    placements: Sequence[Placement],
    types: Optional[TypeSystem] = None,
) -> EdfResult:
    """Fill the given batch slots earliest-deadline-first, in time order.

    Feasible iff every job lands in a slot inside its window; the resulting
    job assignment comes back as a schedule.
    """
    types = types or RealTypes(instance.machine_types)
    jobs = sorted(instance.jobs, key=lambda j: (j.release, j.id))
    waiting: List[Tuple[int, int]] = []
    pos = 0
    batches: List[Batch] = []

    for place in sorted(placements, key=lambda p: (p.time, -types.capacity(p.batch_type))):
        while pos < len(jobs) and jobs[pos].release <= place.time:
            heapq.heappush(waiting, (jobs[pos].deadline, jobs[pos].id))
            pos += 1
        if waiting and waiting[0][0] < place.time:
            return EdfResult(feasible=False, missed_job=waiting[0][1])
        take = [heapq.heappop(waiting)[1] for _ in range(min(types.capacity(place.batch_type), len(waiting)))]
        if take:
            batches.append(Batch(batch_type=place.batch_type, exec_time=place.time, job_ids=tuple(take)))

    if waiting:
        return EdfResult(feasible=False, missed_job=min(waiting)[1])
    if pos < len(jobs):
        return EdfResult(feasible=False, missed_job=jobs[pos].id)
    return EdfResult(feasible=True, schedule=Schedule(batches=tuple(batches), type_system=types))


def matching_feasible(
    instance: Instance,
    placements: Sequence[Placement],
    types: Optional[TypeSystem] = None,
) -> bool:
    """Saturating job-to-slot matching via augmenting paths, slots holding up to their capacity."""
    types = types or RealTypes(instance.machine_types)
    slots = list(placements)
    capacity = [types.capacity(p.batch_type) for p in slots]
    adj: List[List[int]] = [
        [s for s, p in enumerate(slots) if job.release <= p.time <= job.deadline] for job in instance.jobs
    ]
    held: List[List[int]] = [[] for _ in slots]

    def augment(u: int, seen: List[bool]) -> bool:
        for s in adj[u]:
            if seen[s]:
                continue
            seen[s] = True
            if len(held[s]) < capacity[s]:
                held[s].append(u)
                return True
            for i, v in enumerate(held[s]):
                if augment(v, seen):
                    held[s][i] = u
                    return True
        return False

    for u in range(len(instance.jobs)):
        if not augment(u, [False] * len(slots)):
            return False
    return True


@dataclass(frozen=True)
class OptResult:
    schedule: Schedule
    cost: Fraction
    nodes: int = 0


def exact_opt(
    instance: Instance,
    limits: Optional[OracleLimits] = None,
    machine_types: Optional[Sequence[MachineType]] = None,
) -> OptResult:
    """Minimum-cost schedule by branch and bound over deadline slots.

    At each distinct deadline the search serves the s earliest-deadline
    waiting jobs, covering them with the cheapest machine multiset. Type
    indices of the result refer to the canonicalized menu.
    """
    menu = canonicalize_types(machine_types if machine_types is not None else instance.machine_types)
    target = instance.with_machine_types(menu)
    limits = limits or OracleLimits.from_env()
    decision = limits.check(target)
    if not decision.allowed:
        logger.info("exact_opt refused: %s", decision.reason)
        raise OracleLimitExceeded(f"exact optimum refused: {decision.reason}")

    types = RealTypes(menu)
    if not target.jobs:
        return OptResult(schedule=Schedule(batches=(), type_system=types), cost=Fraction(0))

    table = OptimalBatches(types)
    deadlines = sorted({j.deadline for j in target.jobs})
    by_release = sorted(target.jobs, key=lambda j: j.release)
    releases = [j.release for j in by_release]
    # jobs released in (deadlines[i-1], deadlines[i]]
    arrivals: List[Tuple[int, ...]] = []
    prev = 0
    for d in deadlines:
        cut = bisect_right(releases, d)
        arrivals.append(tuple(j.deadline for j in by_release[prev:cut]))
        prev = cut
    future = [0] * (len(deadlines) + 1)
    for i in range(len(deadlines) - 1, -1, -1):
        future[i] = future[i + 1] + len(arrivals[i])

    best_cost: Optional[Fraction] = None
    best_path: List[int] = []
    seen: Dict[Tuple[int, Tuple[int, ...]], Fraction] = {}
    path: List[int] = []
    nodes = 0

    def search(i: int, carried: Tuple[int, ...], spent: Fraction) -> None:
        nonlocal best_cost, best_path, nodes
        nodes += 1
        if i == len(deadlines):
            if best_cost is None or spent < best_cost:
                best_cost, best_path = spent, list(path)
            return
        key = (i, carried)
        if key in seen and seen[key] <= spent:
            return
        seen[key] = spent
        waiting = tuple(sorted(carried + arrivals[i]))
        if best_cost is not None and spent + table.cost(len(waiting) + future[i + 1]) >= best_cost:
            return
        now = deadlines[i]
        due = bisect_right(waiting, now)
        options: List[int] = []
        for s in range(len(waiting), due - 1, -1):
            if s < len(waiting) and table.cost(s) == table.cost(s + 1):
                continue
            options.append(s)
        for s in options:
            path.append(s)
            search(i + 1, waiting[s:], spent + table.cost(s))
            path.pop()

    search(0, (), Fraction(0))
    assert best_cost is not None

    placements = [
        Placement(time=deadlines[i], batch_type=k) for i, s in enumerate(best_path) for k in table.batches(s)
    ]
    result = edf_feasible(target, placements, types)
    if not result.feasible or result.schedule is None:
        raise ConstructionError(f"optimum placements failed EDF replay at job {result.missed_job}")
    problems = validate_schedule(target, result.schedule)
    if problems:
        raise ConstructionError(f"optimum schedule invalid: {problems[0].detail}")
    cost = schedule_cost(result.schedule)
    if cost > best_cost:
        raise ConstructionError(f"optimum replay cost {cost} above search cost {best_cost}")
    logger.debug("exact_opt n=%s deadlines=%s nodes=%s cost=%s", target.n, len(deadlines), nodes, cost)
    return OptResult(schedule=result.schedule, cost=cost, nodes=nodes)


def placements_of(schedule: Schedule) -> PlacementSet:
    return tuple(sorted(Placement(time=b.exec_time, batch_type=b.batch_type) for b in schedule.batches))

