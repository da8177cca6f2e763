from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, List, Tuple

from busytime.errors import ScheduleError

if TYPE_CHECKING:
    from busytime.instance import Instance, TypeSystem


@dataclass(frozen=True, slots=True)
class Batch:
    batch_type: int
    exec_time: int
    job_ids: Tuple[int, ...]


@dataclass(frozen=True)
class Schedule:
    batches: Tuple[Batch, ...]
    type_system: "TypeSystem"

    @property
    def kind(self) -> str:
        return self.type_system.kind

    def __len__(self) -> int:
        return len(self.batches)


@dataclass(frozen=True)
class Violation:
    batch_index: int | None
    rule: str  # "partition" | "coverage" | "capacity" | "window"
    detail: str


def validate_schedule(instance: "Instance", schedule: Schedule, complete: bool = True) -> List[Violation]:
    """Check partition, capacity and window rules; an empty list means the schedule is valid."""
    types = schedule.type_system
    jobs = instance.job_index
    violations: List[Violation] = []
    owner: Dict[int, int] = {}

    for idx, batch in enumerate(schedule.batches):
        if not 0 <= batch.batch_type < types.num_types:
            raise ScheduleError(f"batch {idx}: unknown type index {batch.batch_type}")
        for job_id in batch.job_ids:
            if job_id not in jobs:
                raise ScheduleError(f"batch {idx}: unknown job id {job_id}")

        cap = types.capacity(batch.batch_type)
        if len(batch.job_ids) > cap:
            violations.append(
                Violation(idx, "capacity", f"{len(batch.job_ids)} jobs in a type-{batch.batch_type} batch of capacity {cap}")
            )
        for job_id in batch.job_ids:
            job = jobs[job_id]
            if not job.release <= batch.exec_time <= job.deadline:
                violations.append(
                    Violation(
                        idx,
                        "window",
                        f"job {job_id} window [{job.release}, {job.deadline}] misses slot {batch.exec_time}",
                    )
                )
            if job_id in owner:
                violations.append(Violation(idx, "partition", f"job {job_id} already in batch {owner[job_id]}"))
            else:
                owner[job_id] = idx

    if complete:
        for job in instance.jobs:
            if job.id not in owner:
                violations.append(Violation(None, "coverage", f"job {job.id} is in no batch"))
    return violations


def schedule_cost(schedule: Schedule) -> Fraction:
    types = schedule.type_system
    return sum((types.cost(b.batch_type) for b in schedule.batches), Fraction(0))


def realize_schedule(schedule: Schedule) -> Schedule:
    """Map a virtual (ladder) schedule onto real machines; real schedules pass through."""
    types = schedule.type_system
    if types.kind == "real":
        return schedule
    from busytime.instance import RealTypes

    batches: List[Batch] = []
    for b in schedule.batches:
        batches.extend(types.realize(b.batch_type, b.exec_time, b.job_ids))
    return Schedule(batches=tuple(batches), type_system=RealTypes(types.real_types))
