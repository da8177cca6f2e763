from __future__ import annotations

import os
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

if TYPE_CHECKING:
    from busytime.instance import Instance


@dataclass
class OracleLimits:
    max_jobs: int = 16
    max_deadlines: int = 12
    max_types: int = 5

    @classmethod
    def from_env(
        cls,
        max_jobs: Optional[int] = None,
        max_deadlines: Optional[int] = None,
        max_types: Optional[int] = None,
    ) -> "OracleLimits":
        defaults = cls()
        return cls(
            max_jobs=max_jobs or int(os.environ.get("BUSYTIME_ORACLE_MAX_JOBS") or defaults.max_jobs),
            max_deadlines=max_deadlines
            or int(os.environ.get("BUSYTIME_ORACLE_MAX_DEADLINES") or defaults.max_deadlines),
            max_types=max_types or int(os.environ.get("BUSYTIME_ORACLE_MAX_TYPES") or defaults.max_types),
        )

    def check(self, instance: "Instance") -> "LimitDecision":
        deadlines = len({j.deadline for j in instance.jobs})
        if instance.n > self.max_jobs:
            return LimitDecision(allowed=False, reason=f"n={instance.n} exceeds max_jobs={self.max_jobs}")
        if deadlines > self.max_deadlines:
            return LimitDecision(
                allowed=False, reason=f"{deadlines} distinct deadlines exceed max_deadlines={self.max_deadlines}"
            )
        if len(instance.machine_types) > self.max_types:
            return LimitDecision(
                allowed=False,
                reason=f"K={len(instance.machine_types)} exceeds max_types={self.max_types}",
            )
        return LimitDecision(allowed=True)


@dataclass
class LimitDecision:
    allowed: bool
    reason: str = ""


def resolve_seed(seed: Optional[int] = None) -> int:
    if seed is not None:
        return seed
    return int(os.environ.get("BUSYTIME_SEED") or 0)
