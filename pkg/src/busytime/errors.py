from __future__ import annotations

from typing import Any


class BusyTimeError(RuntimeError):
    """Base class for every failure the package reports on purpose."""


class InstanceError(BusyTimeError, ValueError):
    pass


class ScheduleError(BusyTimeError, ValueError):
    pass


class SimulationFault(BusyTimeError):
    """An online run could not continue; `trace` holds what happened so far."""

    def __init__(self, message: str, trace: Any = None) -> None:
        super().__init__(message)
        self.trace = trace


class OracleLimitExceeded(BusyTimeError):
    pass


class ConstructionError(BusyTimeError):
    pass


class CreditAuditError(BusyTimeError):
    def __init__(self, claim: str, batch_index: int | None, message: str) -> None:
        where = f" (OPT batch {batch_index})" if batch_index is not None else ""
        super().__init__(f"{claim}{where}: {message}")
        self.claim = claim
        self.batch_index = batch_index


class GeneratorRefusal(BusyTimeError):
    def __init__(self, family: str, size: int, limit: int) -> None:
        super().__init__(f"{family}: instance would hold {size} jobs (limit {limit})")
        self.size = size
        self.limit = limit
