from __future__ import annotations

import heapq
import json
import logging
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Protocol, Sequence, Tuple

from busytime.errors import SimulationFault
from busytime.instance import Instance, JobSpec, TypeSystem
from busytime.schedule import Batch, Schedule

logger = logging.getLogger(__name__)


class WaitingSet:
    """Released, unscheduled jobs keyed by (deadline, id)."""

    def __init__(self) -> None:
        self._heap: List[Tuple[int, int, JobSpec]] = []

    def __len__(self) -> int:
        return len(self._heap)

    def push_many(self, jobs: Iterable[JobSpec]) -> None:
        for job in jobs:
            heapq.heappush(self._heap, (job.deadline, job.id, job))

    def min_deadline(self) -> Optional[int]:
        return self._heap[0][0] if self._heap else None

    def peek(self) -> Optional[JobSpec]:
        return self._heap[0][2] if self._heap else None

    def count_due(self, time: int) -> int:
        # walk only the heap nodes with deadline <= time
        heap = self._heap
        count = 0
        stack = [0] if heap else []
        while stack:
            i = stack.pop()
            if heap[i][0] > time:
                continue
            count += 1
            for child in (2 * i + 1, 2 * i + 2):
                if child < len(heap):
                    stack.append(child)
        return count

    def pop_earliest(self, count: int) -> List[JobSpec]:
        heap = self._heap
        return [heapq.heappop(heap)[2] for _ in range(min(count, len(heap)))]

    def sorted_jobs(self) -> List[JobSpec]:
        return [entry[2] for entry in sorted(self._heap)]

    def view(self) -> "WaitingView":
        return WaitingView(self)


class WaitingView:
    """Read-only window on the waiting set handed to algorithms."""

    __slots__ = ("_waiting",)

    def __init__(self, waiting: WaitingSet) -> None:
        self._waiting = waiting

    def __len__(self) -> int:
        return len(self._waiting)

    def min_deadline(self) -> Optional[int]:
        return self._waiting.min_deadline()

    def peek(self) -> Optional[JobSpec]:
        return self._waiting.peek()

    def count_due(self, time: int) -> int:
        return self._waiting.count_due(time)

    def jobs(self) -> List[JobSpec]:
        return self._waiting.sorted_jobs()


@dataclass(frozen=True, slots=True)
class DispatchRecord:
    exec_time: int
    batch_type: int
    job_ids: Tuple[int, ...]
    critical: Optional[int] = None


class DispatchTrace:
    """Append-only event log of one online run."""

    def __init__(self, type_system: TypeSystem) -> None:
        self.type_system = type_system
        self._records: List[DispatchRecord] = []

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[DispatchRecord]:
        return iter(self._records)

    def __getitem__(self, index: int) -> DispatchRecord:
        return self._records[index]

    def append(self, record: DispatchRecord) -> None:
        if self._records and record.exec_time < self._records[-1].exec_time:
            raise SimulationFault(
                f"trace out of order: {record.exec_time} after {self._records[-1].exec_time}", trace=self
            )
        self._records.append(record)

    def since(self, index: int) -> List[DispatchRecord]:
        return self._records[index:]

    def to_jsonl(self) -> str:
        lines = [
            json.dumps({"t": r.exec_time, "type": r.batch_type, "jobs": list(r.job_ids), "critical": r.critical})
            for r in self._records
        ]
        return "".join(line + "\n" for line in lines)

    @classmethod
    def from_jsonl(cls, text: str, type_system: TypeSystem) -> "DispatchTrace":
        trace = cls(type_system)
        for line in text.splitlines():
            if not line.strip():
                continue
            obj = json.loads(line)
            trace.append(
                DispatchRecord(
                    exec_time=int(obj["t"]),
                    batch_type=int(obj["type"]),
                    job_ids=tuple(int(j) for j in obj["jobs"]),
                    critical=obj.get("critical"),
                )
            )
        return trace


class InstanceSource(Protocol):
    def next_arrival(self, trace: DispatchTrace) -> Optional[int]: ...

    def take(self, time: int, trace: DispatchTrace) -> List[JobSpec]: ...


class StaticSource:
    """Replays a fixed instance in (release, id) order."""

    def __init__(self, instance: Instance) -> None:
        self._jobs = sorted(instance.jobs, key=lambda j: (j.release, j.id))
        self._pos = 0

    def next_arrival(self, trace: DispatchTrace) -> Optional[int]:
        if self._pos >= len(self._jobs):
            return None
        return self._jobs[self._pos].release

    def take(self, time: int, trace: DispatchTrace) -> List[JobSpec]:
        start = self._pos
        jobs = self._jobs
        while self._pos < len(jobs) and jobs[self._pos].release == time:
            self._pos += 1
        return jobs[start : self._pos]


class OnlineAlgorithm(Protocol):
    name: str

    def on_arrivals(self, time: int, jobs: Sequence[JobSpec]) -> None: ...

    def decide(self, time: int, waiting: WaitingView) -> List[int]: ...

    def on_dispatch(self, record: DispatchRecord, jobs: Sequence[JobSpec], remaining: int) -> None: ...


@dataclass(frozen=True)
class RunResult:
    schedule: Schedule
    trace: DispatchTrace
    jobs: Tuple[JobSpec, ...]

    def instance(self) -> Instance:
        return Instance(jobs=self.jobs, machine_types=self.schedule.type_system.real_types)


def edf_fill(waiting: WaitingSet, capacity: int, time: int) -> List[JobSpec]:
    due = waiting.min_deadline()
    if due is not None and due < time:
        job = waiting.peek()
        raise SimulationFault(f"missed deadline: job {job.id} due at {due}, now {time}")
    return waiting.pop_earliest(capacity)


def run_online(source: InstanceSource, algorithm: OnlineAlgorithm, type_system: TypeSystem) -> RunResult:
    trace = DispatchTrace(type_system)
    waiting = WaitingSet()
    view = waiting.view()
    batches: List[Batch] = []
    yielded: List[JobSpec] = []
    seen_ids: set[int] = set()
    last_time: Optional[int] = None

    while True:
        arrival = source.next_arrival(trace)
        due = waiting.min_deadline()
        if arrival is None and due is None:
            break
        now = min(t for t in (arrival, due) if t is not None)
        if last_time is not None and now < last_time:
            raise SimulationFault(f"source went back in time: {now} after {last_time}", trace=trace)

        if arrival == now:
            jobs = source.take(now, trace)
            for job in jobs:
                if job.id in seen_ids:
                    raise SimulationFault(f"job {job.id} yielded twice", trace=trace)
                if job.release != now or job.deadline < now:
                    raise SimulationFault(
                        f"job {job.id} window [{job.release}, {job.deadline}] yielded at {now}", trace=trace
                    )
                seen_ids.add(job.id)
            yielded.extend(jobs)
            waiting.push_many(jobs)
            algorithm.on_arrivals(now, jobs)

        rounds = 0
        while waiting.min_deadline() == now:
            rounds += 1
            if rounds > len(yielded) + 1:
                logger.warning("livelock guard tripped at t=%s for %s", now, algorithm.name)
                raise SimulationFault(f"{algorithm.name} made no progress at t={now}", trace=trace)
            for k in algorithm.decide(now, view):
                if not 0 <= k < type_system.num_types:
                    raise SimulationFault(f"{algorithm.name} chose unknown type {k} at t={now}", trace=trace)
                if not waiting:
                    break
                try:
                    jobs = edf_fill(waiting, type_system.capacity(k), now)
                except SimulationFault as e:
                    e.trace = trace
                    raise
                critical = min((j.id for j in jobs if j.deadline == now), default=None)
                record = DispatchRecord(
                    exec_time=now, batch_type=k, job_ids=tuple(j.id for j in jobs), critical=critical
                )
                trace.append(record)
                batches.append(Batch(batch_type=k, exec_time=now, job_ids=record.job_ids))
                algorithm.on_dispatch(record, jobs, len(waiting))
        last_time = now

    schedule = Schedule(batches=tuple(batches), type_system=type_system)
    return RunResult(schedule=schedule, trace=trace, jobs=tuple(yielded))
