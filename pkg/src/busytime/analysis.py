from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional, Sequence, Tuple

from busytime.errors import CreditAuditError, ScheduleError
from busytime.schedule import Schedule, Violation, validate_schedule

if TYPE_CHECKING:
    from busytime.algorithms import LedgerEntry
    from busytime.engine import DispatchTrace
    from busytime.instance import Instance, TypeSystem


@dataclass(frozen=True)
class IntervalTuple:
    """One (I, t_I, J_I) entry of an interval assignment; I = [left, right]."""

    left: int
    right: int
    batch_type: int
    jobs: Tuple[int, ...]


def check_valid_assignment(
    instance: "Instance",
    assignment: Sequence[IntervalTuple],
    types: "TypeSystem",
) -> List[Violation]:
    """Violations of the four validity rules; empty means valid.

    Rules: `size` (|J_I| is 1 for type 0, else the capacity of type t_I - 1),
    `containment` (every window of J_I lies inside I), `disjoint` (intervals of
    one type share no slot), `unique` (a job belongs to at most one J_I).
    """
    jobs = instance.job_index
    violations: List[Violation] = []
    owner: Dict[int, int] = {}
    by_type: Dict[int, List[Tuple[int, int, int]]] = defaultdict(list)

    for idx, entry in enumerate(assignment):
        if not 0 <= entry.batch_type < types.num_types:
            raise ScheduleError(f"interval {idx}: unknown type index {entry.batch_type}")
        if entry.left > entry.right:
            violations.append(Violation(idx, "containment", f"empty interval [{entry.left}, {entry.right}]"))
        want = 1 if entry.batch_type == 0 else types.capacity(entry.batch_type - 1)
        if len(entry.jobs) != want:
            violations.append(
                Violation(idx, "size", f"type {entry.batch_type} needs {want} jobs, has {len(entry.jobs)}")
            )
        for job_id in entry.jobs:
            if job_id not in jobs:
                raise ScheduleError(f"interval {idx}: unknown job id {job_id}")
            job = jobs[job_id]
            if job.release < entry.left or job.deadline > entry.right:
                violations.append(
                    Violation(
                        idx,
                        "containment",
                        f"job {job_id} window [{job.release}, {job.deadline}] leaves [{entry.left}, {entry.right}]",
                    )
                )
            if job_id in owner:
                violations.append(Violation(idx, "unique", f"job {job_id} already charged to interval {owner[job_id]}"))
            else:
                owner[job_id] = idx
        by_type[entry.batch_type].append((entry.left, entry.right, idx))

    for t, spans in by_type.items():
        spans.sort()
        reach: Optional[Tuple[int, int]] = None
        for left, right, idx in spans:
            if reach is not None and left <= reach[0]:
                violations.append(Violation(idx, "disjoint", f"type-{t} interval shares a slot with interval {reach[1]}"))
            if reach is None or right > reach[0]:
                reach = (right, idx)
    return violations


def sigma(assignment: Iterable[IntervalTuple]) -> int:
    return sum(2**entry.batch_type for entry in assignment)


@dataclass(frozen=True)
class BatchCredit:
    batch_index: int
    batch_type: int
    small_side: Fraction
    large_side: Fraction

    @property
    def total(self) -> Fraction:
        return self.small_side + self.large_side


@dataclass(frozen=True)
class IntervalCredit:
    interval_index: int
    batch_type: int
    received: Fraction

    @property
    def required(self) -> int:
        return 2**self.batch_type


@dataclass(frozen=True)
class CreditReport:
    batches: Tuple[BatchCredit, ...]
    intervals: Tuple[IntervalCredit, ...]
    opt_units: int

    @property
    def distributed(self) -> Fraction:
        return sum((b.total for b in self.batches), Fraction(0))


def credit_audit(
    instance: "Instance",
    opt_schedule: Schedule,
    assignment: Sequence[IntervalTuple],
    types: "TypeSystem",
) -> CreditReport:
    """Distribute 4x the optimum's unit cost over the assignment's intervals.

    `opt_schedule` uses the ladder's virtual menu: a type-k batch costs 2^k
    units and holds `types.capacity(k)` jobs. Every claimed inequality is
    checked exactly; the first failure raises CreditAuditError.
    """
    problems = validate_schedule(instance, opt_schedule)
    if problems:
        first = problems[0]
        raise CreditAuditError("optimum schedule valid", first.batch_index, first.detail)
    bad = check_valid_assignment(instance, assignment, types)
    if bad:
        first = bad[0]
        raise CreditAuditError("assignment valid", None, f"interval {first.batch_index}: {first.detail}")

    owner: Dict[int, int] = {}
    for idx, entry in enumerate(assignment):
        for job_id in entry.jobs:
            owner[job_id] = idx

    received = [Fraction(0)] * len(assignment)
    batches: List[BatchCredit] = []
    for b_idx, batch in enumerate(opt_schedule.batches):
        k = batch.batch_type
        per_job_large = Fraction(2 ** (k + 1), types.capacity(k))
        small = Fraction(0)
        large = Fraction(0)
        for job_id in batch.job_ids:
            i = owner.get(job_id)
            if i is None:
                continue
            entry = assignment[i]
            t = entry.batch_type
            own_share = Fraction(2**t, len(entry.jobs))
            if t <= k:
                small += own_share
                received[i] += own_share
            else:
                if own_share > per_job_large:
                    raise CreditAuditError(
                        "large-side credit covers own share",
                        b_idx,
                        f"job {job_id}: 2^{t}/{len(entry.jobs)} > 2^{k + 1}/{types.capacity(k)}",
                    )
                large += per_job_large
                received[i] += per_job_large
        if small > 2 ** (k + 1):
            raise CreditAuditError("small-side credit bounded", b_idx, f"{small} > 2^{k + 1}")
        if large > 2 ** (k + 1):
            raise CreditAuditError("large-side credit bounded", b_idx, f"{large} > 2^{k + 1}")
        batches.append(BatchCredit(batch_index=b_idx, batch_type=k, small_side=small, large_side=large))

    intervals: List[IntervalCredit] = []
    for i, entry in enumerate(assignment):
        if received[i] == 0:
            raise CreditAuditError("interval unserved", None, f"interval {i} [{entry.left}, {entry.right}] got no credit")
        if received[i] < 2**entry.batch_type:
            raise CreditAuditError(
                "interval fully paid", None, f"interval {i} received {received[i]} < 2^{entry.batch_type}"
            )
        intervals.append(IntervalCredit(interval_index=i, batch_type=entry.batch_type, received=received[i]))

    opt_units = sum(2**b.batch_type for b in opt_schedule.batches)
    report = CreditReport(batches=tuple(batches), intervals=tuple(intervals), opt_units=opt_units)
    if report.distributed > 4 * opt_units:
        raise CreditAuditError("total within 4x optimum", None, f"{report.distributed} > 4 * {opt_units}")
    return report


def overlap_depth(trace: "DispatchTrace", instance: "Instance") -> int:
    """Largest number of per-dispatch-time spans [min release, max deadline] sharing a slot."""
    jobs = instance.job_index
    spans: Dict[int, Tuple[int, int]] = {}
    for record in trace:
        for job_id in record.job_ids:
            job = jobs[job_id]
            cur = spans.get(record.exec_time)
            if cur is None:
                spans[record.exec_time] = (job.release, job.deadline)
            else:
                spans[record.exec_time] = (min(cur[0], job.release), max(cur[1], job.deadline))

    events: List[Tuple[int, int]] = []
    for left, right in spans.values():
        events.append((left, 1))
        events.append((right + 1, -1))
    events.sort()  # -1 sorts before +1 at one coordinate
    depth = best = 0
    for _, delta in events:
        depth += delta
        best = max(best, depth)
    return best


def check_escalation(
    instance: "Instance",
    trace: "DispatchTrace",
    ledger: Iterable["LedgerEntry"],
    types: "TypeSystem",
) -> List[Violation]:
    """Each rung-k (k > 0) choice must rest on a full rung-(k-1) batch whose jobs were all due by then."""
    jobs = instance.job_index
    violations: List[Violation] = []
    for idx, entry in enumerate(ledger):
        k = entry.batch_type
        src = entry.escalated_from
        if k == 0:
            continue
        if src is None:
            violations.append(Violation(idx, "escalation", f"rung {k} chosen without a source batch"))
            continue
        rec = trace[src]
        if rec.batch_type != k - 1:
            violations.append(Violation(idx, "escalation", f"source batch {src} has type {rec.batch_type}, not {k - 1}"))
        if len(rec.job_ids) != types.capacity(k - 1):
            violations.append(
                Violation(idx, "escalation", f"source batch {src} holds {len(rec.job_ids)} of {types.capacity(k - 1)}")
            )
        late = [j for j in rec.job_ids if jobs[j].deadline > entry.right]
        if late:
            violations.append(Violation(idx, "escalation", f"source batch {src} has jobs due after {entry.right}: {late}"))
    return violations
