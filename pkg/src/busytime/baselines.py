from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence

from busytime.algorithms import GreedyAgreeable, OptimalBatches
from busytime.engine import DispatchRecord, WaitingView
from busytime.instance import JobSpec, TypeSystem


class GreedyGeneral(GreedyAgreeable):
    """The agreeable greedy rule applied to arbitrary instances."""

    name = "greedy_general"


class MostCostEfficient:
    name = "most_cost_efficient"

    def __init__(self, types: TypeSystem) -> None:
        self.types = types

    def on_arrivals(self, time: int, jobs: Sequence[JobSpec]) -> None:
        pass

    def decide(self, time: int, waiting: WaitingView) -> List[int]:
        w = len(waiting)
        best_k = 0
        best_rate = None
        for k in range(self.types.num_types):
            rate = Fraction(self.types.cost(k)) / min(self.types.capacity(k), w)
            if best_rate is None or rate < best_rate:
                best_k, best_rate = k, rate
        return [best_k]

    def on_dispatch(self, record: DispatchRecord, jobs: Sequence[JobSpec], remaining: int) -> None:
        pass


class Lazy:
    """Serve only what is due now, unless the waiting set fills the largest machine."""

    name = "lazy"

    def __init__(self, types: TypeSystem) -> None:
        self.types = types
        self._table = OptimalBatches(types)
        self._largest = types.num_types - 1

    def on_arrivals(self, time: int, jobs: Sequence[JobSpec]) -> None:
        pass

    def decide(self, time: int, waiting: WaitingView) -> List[int]:
        if len(waiting) >= self.types.capacity(self._largest):
            return [self._largest]
        return self._table.batches(waiting.count_due(time))

    def on_dispatch(self, record: DispatchRecord, jobs: Sequence[JobSpec], remaining: int) -> None:
        pass


class RampUp:
    """Buy the largest machine the spend so far can pay for; forget the spend once idle."""

    name = "ramp_up"

    def __init__(self, types: TypeSystem) -> None:
        self.types = types
        self.spent = Fraction(0)

    def on_arrivals(self, time: int, jobs: Sequence[JobSpec]) -> None:
        pass

    def decide(self, time: int, waiting: WaitingView) -> List[int]:
        chosen = 0
        for k in range(self.types.num_types):
            if self.types.cost(k) <= self.spent:
                chosen = k
        return [chosen]

    def on_dispatch(self, record: DispatchRecord, jobs: Sequence[JobSpec], remaining: int) -> None:
        self.spent += self.types.cost(record.batch_type)
        if remaining == 0:
            self.spent = Fraction(0)
