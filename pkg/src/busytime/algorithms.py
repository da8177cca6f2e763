from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

from busytime.analysis import IntervalTuple
from busytime.engine import DispatchRecord, WaitingView
from busytime.errors import SimulationFault
from busytime.instance import JobSpec, NormalizedLadder, TypeSystem

logger = logging.getLogger(__name__)


class OptimalBatches:
    """Cheapest machine multiset covering m jobs, for one type system.

    cost(m) = min over k of cost(m - min(B_k, m)) + c_k, with cost(0) = 0.
    The table grows on demand and is kept in integers scaled by the common
    cost denominator.
    """

    def __init__(self, types: TypeSystem) -> None:
        self.types = types
        costs = [Fraction(types.cost(k)) for k in range(types.num_types)]
        self._denominator = math.lcm(*(c.denominator for c in costs))
        self._caps = [types.capacity(k) for k in range(types.num_types)]
        self._scaled = [int(c * self._denominator) for c in costs]
        self._table: List[int] = [0]
        self._choice: List[int] = [-1]

    def _extend(self, m: int) -> None:
        table, choice = self._table, self._choice
        caps, scaled = self._caps, self._scaled
        for x in range(len(table), m + 1):
            best = -1
            arg = -1
            for k, cap in enumerate(caps):
                c = table[x - cap if cap < x else 0] + scaled[k]
                if arg < 0 or c < best:
                    best, arg = c, k
            table.append(best)
            choice.append(arg)

    def cost(self, m: int) -> Fraction:
        if m < 0:
            raise ValueError(f"job count must be >= 0, got {m}")
        self._extend(m)
        return Fraction(self._table[m], self._denominator)

    def batches(self, m: int) -> List[int]:
        """Types of the optimal multiset, largest type first."""
        self.cost(m)
        out: List[int] = []
        while m > 0:
            k = self._choice[m]
            out.append(k)
            m -= min(self._caps[k], m)
        out.sort(reverse=True)
        return out


def get_optimal_batches(m: int, types: TypeSystem) -> Tuple[List[int], Fraction]:
    table = OptimalBatches(types)
    return table.batches(m), table.cost(m)


class GreedyAgreeable:
    """At every deadline, clear the whole waiting set with the DP-optimal machines."""

    name = "greedy_agreeable"

    def __init__(self, types: TypeSystem) -> None:
        self.types = types
        self._table = OptimalBatches(types)

    def on_arrivals(self, time: int, jobs: Sequence[JobSpec]) -> None:
        pass

    def decide(self, time: int, waiting: WaitingView) -> List[int]:
        return self._table.batches(len(waiting))

    def on_dispatch(self, record: DispatchRecord, jobs: Sequence[JobSpec], remaining: int) -> None:
        pass


# -----------------------
# Main algorithm
# -----------------------

@dataclass(frozen=True)
class LastBatch:
    time: int
    earliest_release: int
    job_ids: Tuple[int, ...]
    critical: Optional[int]
    trace_index: int


class TypeTracker:
    """Latest dispatched batch per ladder rung."""

    def __init__(self, num_rungs: int) -> None:
        self._latest: List[Optional[LastBatch]] = [None] * num_rungs

    def latest(self, k: int) -> Optional[LastBatch]:
        if k >= len(self._latest):
            return None
        return self._latest[k]

    def update(self, k: int, batch: LastBatch) -> None:
        self._latest[k] = batch


@dataclass(frozen=True)
class TypeChoice:
    rung: int
    left: int
    right: int
    charged: Tuple[int, ...]
    escalated_from: Optional[int] = None


def main_choose_type(time: int, critical: JobSpec, tracker: TypeTracker, max_rung: int) -> TypeChoice:
    left = critical.release
    k = 0
    prev: Optional[LastBatch] = None
    while True:
        last = tracker.latest(k)
        if last is None or not left <= last.time <= time:
            break
        left = min(left, last.earliest_release)
        prev = last
        k += 1
        if k > max_rung:
            raise SimulationFault(f"rung {k} above ladder top {max_rung} at t={time}")

    if prev is None:
        return TypeChoice(rung=k, left=left, right=time, charged=(critical.id,))
    charged = (critical.id,) + tuple(j for j in prev.job_ids if j != prev.critical)
    return TypeChoice(rung=k, left=left, right=time, charged=charged, escalated_from=prev.trace_index)


@dataclass(frozen=True)
class LedgerEntry:
    left: int
    right: int
    batch_type: int
    charged: Tuple[int, ...]
    escalated_from: Optional[int] = None

    def to_interval(self) -> IntervalTuple:
        return IntervalTuple(left=self.left, right=self.right, batch_type=self.batch_type, jobs=self.charged)


class AssignmentLedger:
    def __init__(self) -> None:
        self._entries: List[LedgerEntry] = []

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[LedgerEntry]:
        return iter(self._entries)

    def __getitem__(self, index: int) -> LedgerEntry:
        return self._entries[index]

    def append(self, entry: LedgerEntry) -> None:
        self._entries.append(entry)

    def intervals(self) -> List[IntervalTuple]:
        return [e.to_interval() for e in self._entries]


class MainAlgorithm:
    """Nested-interval rung selection on a normalized ladder.

    At each forced dispatch the critical job starts interval [r, t]; every rung
    whose latest batch falls inside the interval widens it to that batch's
    earliest release and pushes the choice one rung up.
    """

    name = "main"

    def __init__(self, ladder: NormalizedLadder) -> None:
        self.ladder = ladder
        self.tracker = TypeTracker(ladder.num_types)
        self.ledger = AssignmentLedger()
        self._pending: Optional[TypeChoice] = None
        self._dispatched = 0

    def on_arrivals(self, time: int, jobs: Sequence[JobSpec]) -> None:
        pass

    def decide(self, time: int, waiting: WaitingView) -> List[int]:
        critical = waiting.peek()
        if critical is None or critical.deadline != time:
            return []
        self._pending = main_choose_type(time, critical, self.tracker, self.ladder.max_rung)
        return [self._pending.rung]

    def on_dispatch(self, record: DispatchRecord, jobs: Sequence[JobSpec], remaining: int) -> None:
        choice = self._pending
        if choice is None or choice.rung != record.batch_type:
            raise SimulationFault(f"unexpected dispatch of type {record.batch_type} at t={record.exec_time}")
        self._pending = None
        self.ledger.append(
            LedgerEntry(
                left=choice.left,
                right=record.exec_time,
                batch_type=record.batch_type,
                charged=choice.charged,
                escalated_from=choice.escalated_from,
            )
        )
        self.tracker.update(
            record.batch_type,
            LastBatch(
                time=record.exec_time,
                earliest_release=min(j.release for j in jobs),
                job_ids=record.job_ids,
                critical=record.critical,
                trace_index=self._dispatched,
            ),
        )
        if choice.rung > 0:
            logger.debug("t=%s escalated to rung %s over [%s, %s]", record.exec_time, choice.rung, choice.left, choice.right)
        self._dispatched += 1
