from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from busytime.engine import DispatchRecord, DispatchTrace, RunResult
from busytime.errors import ConstructionError, InstanceError
from busytime.instance import Instance, JobSpec, MachineType, RealTypes
from busytime.oracle import Placement, edf_feasible
from busytime.registry import run_named
from busytime.schedule import Schedule, realize_schedule, schedule_cost, validate_schedule

logger = logging.getLogger(__name__)

SMALL = 0
LARGE = 1


def adversary_menu(M: int) -> Tuple[MachineType, ...]:
    return (
        MachineType(capacity=1, cost=Fraction(1)),
        MachineType(capacity=M**3, cost=Fraction(M)),
    )


def _check_m(M: int) -> None:
    if M < 4 or M % 2:
        raise InstanceError(f"adversary needs an even M >= 4, got {M}")


def uses_large_machine(record: DispatchRecord, trace: DispatchTrace) -> bool:
    batches = trace.type_system.realize(record.batch_type, record.exec_time, record.job_ids)
    return any(b.batch_type == LARGE and b.job_ids for b in batches)


@dataclass
class AdversaryState:
    M: int
    groups_released: int = 0
    next_even_deadline: int = 2
    releases: List[int] = field(default_factory=list)
    pending: Optional[int] = None
    scanned: int = 0
    suppressed: int = 0


class AdaptiveGroupSource:
    """Adaptive source: a new group of M^3/2 unit jobs each time a large machine is used.

    Releases fall on odd slots, deadlines on fresh even slots, so the
    resulting instance is agreeable. At most M groups are released.
    """

    def __init__(self, M: int) -> None:
        _check_m(M)
        self.state = AdversaryState(M=M)
        self.group_size = M**3 // 2
        self._next_id = 0
        self.jobs: List[JobSpec] = []

    def _scan(self, trace: DispatchTrace) -> None:
        st = self.state
        for record in trace.since(st.scanned):
            if not st.releases or record.exec_time < st.releases[-1]:
                continue
            if not uses_large_machine(record, trace):
                continue
            if st.groups_released >= st.M:
                st.suppressed += 1
                logger.debug("large machine at t=%s after the last group; no release", record.exec_time)
            elif st.pending is None:
                st.pending = record.exec_time + 1 if record.exec_time % 2 == 0 else record.exec_time + 2
        st.scanned = len(trace)

    def next_arrival(self, trace: DispatchTrace) -> Optional[int]:
        if self.state.groups_released == 0:
            return 1
        self._scan(trace)
        return self.state.pending

    def take(self, time: int, trace: DispatchTrace) -> List[JobSpec]:
        st = self.state
        first = max(st.next_even_deadline, time + 1)
        group = [
            JobSpec(id=self._next_id + i, release=time, deadline=first + 2 * i) for i in range(self.group_size)
        ]
        self._next_id += self.group_size
        st.next_even_deadline = first + 2 * self.group_size
        st.groups_released += 1
        st.releases.append(time)
        st.pending = None
        st.scanned = len(trace)
        self.jobs.extend(group)
        logger.info("group %s of %s released at t=%s", st.groups_released, st.M, time)
        return group


def small_counts(M: int, trace: DispatchTrace, releases: List[int]) -> List[int]:
    """q_i: non-empty real small machines used from release i up to release i+1."""
    counts = [0] * len(releases)
    for record in trace:
        idx = -1
        for i, r in enumerate(releases):
            if record.exec_time >= r:
                idx = i
        if idx < 0:
            continue
        for batch in trace.type_system.realize(record.batch_type, record.exec_time, record.job_ids):
            if batch.batch_type == SMALL and batch.job_ids:
                counts[idx] += 1
    return counts


@dataclass(frozen=True)
class AdversaryBounds:
    best: Fraction
    solutions: Dict[str, Fraction]
    schedules: Dict[str, Schedule]
    small_counts: Tuple[int, ...]


def _paired_placements(groups: List[List[JobSpec]], counts: List[int], leaders: set[int]) -> List[Placement]:
    placements: List[Placement] = []
    covered = False
    for i, group in enumerate(groups):
        deadlines = [j.deadline for j in group]
        if covered:
            covered = False
            continue
        if i not in leaders:
            placements.append(Placement(time=deadlines[0], batch_type=LARGE))
            continue
        smalls = min(counts[i] + 1, len(deadlines))
        placements.extend(Placement(time=d, batch_type=SMALL) for d in deadlines[:smalls])
        if smalls < len(deadlines):
            placements.append(Placement(time=deadlines[smalls], batch_type=LARGE))
            covered = i + 1 < len(groups)
        elif i + 1 < len(groups):
            placements.append(Placement(time=groups[i + 1][0].deadline, batch_type=LARGE))
            covered = True
    return placements


def adversary_opt_bounds(M: int, trace: DispatchTrace, released_jobs: List[JobSpec]) -> AdversaryBounds:
    """Cheapest of up to three explicit offline schedules for the released jobs."""
    _check_m(M)
    menu = adversary_menu(M)
    instance = Instance(jobs=tuple(released_jobs), machine_types=menu)
    types = RealTypes(menu)

    by_release: Dict[int, List[JobSpec]] = {}
    for job in released_jobs:
        by_release.setdefault(job.release, []).append(job)
    releases = sorted(by_release)
    groups = [sorted(by_release[r], key=lambda j: (j.deadline, j.id)) for r in releases]
    counts = small_counts(M, trace, releases)

    plans: Dict[str, List[Placement]] = {
        "A": [Placement(time=g[0].deadline, batch_type=LARGE) for g in groups],
    }
    if len(groups) == M:
        # group indices are 0-based: "B" pairs groups (2, 3), (4, 5), ... counting from one
        plans["B"] = _paired_placements(groups, counts, {i for i in range(len(groups)) if i % 2 == 1})
        plans["C"] = _paired_placements(groups, counts, {i for i in range(len(groups)) if i % 2 == 0})

    solutions: Dict[str, Fraction] = {}
    schedules: Dict[str, Schedule] = {}
    for name, placements in plans.items():
        result = edf_feasible(instance, placements, types)
        if not result.feasible or result.schedule is None:
            raise ConstructionError(f"adversary solution {name} misses job {result.missed_job}")
        problems = validate_schedule(instance, result.schedule)
        if problems:
            raise ConstructionError(f"adversary solution {name}: {problems[0].rule}: {problems[0].detail}")
        schedules[name] = result.schedule
        solutions[name] = schedule_cost(result.schedule)
    return AdversaryBounds(
        best=min(solutions.values()),
        solutions=solutions,
        schedules=schedules,
        small_counts=tuple(counts),
    )


@dataclass(frozen=True)
class AdversaryRun:
    algorithm: str
    M: int
    result: RunResult
    cost: Fraction
    bounds: AdversaryBounds
    groups: int

    @property
    def ratio(self) -> Fraction:
        return self.cost / self.bounds.best


def run_adversary(name: str, M: int) -> AdversaryRun:
    source = AdaptiveGroupSource(M)
    menu_only = Instance(jobs=(), machine_types=adversary_menu(M))
    _, result = run_named(name, menu_only, source=source, n=M * source.group_size)
    cost = schedule_cost(realize_schedule(result.schedule))
    bounds = adversary_opt_bounds(M, result.trace, list(result.jobs))
    if source.state.suppressed:
        logger.info("%s: %s large-machine uses after group %s", name, source.state.suppressed, M)
    return AdversaryRun(
        algorithm=name,
        M=M,
        result=result,
        cost=cost,
        bounds=bounds,
        groups=source.state.groups_released,
    )
