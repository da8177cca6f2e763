from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, List, Literal, Optional, Sequence, Union

from pydantic import AliasChoices, BaseModel, Field, TypeAdapter, ValidationError, field_validator

from busytime.analysis import CreditReport, IntervalTuple
from busytime.errors import InstanceError, ScheduleError
from busytime.instance import Instance, JobSpec, MachineType, RealTypes, TypeSystem, normalize_types
from busytime.schedule import Batch, Schedule


def parse_cost(value: Any) -> Fraction:
    """int, float (through its decimal string), decimal string or "p/q"."""
    if isinstance(value, bool):
        raise ValueError(f"cost must be a number, got {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"cost {value!r} is not a rational") from e
    raise ValueError(f"cost must be a number or rational string, got {type(value).__name__}")


def format_rational(value: Fraction) -> Union[int, str]:
    if value.denominator == 1:
        return value.numerator
    return f"{value.numerator}/{value.denominator}"


def rational_str(value: Fraction) -> str:
    return str(format_rational(value))


# -----------------------
# Instance files
# -----------------------

class MachineTypeDoc(BaseModel):
    capacity: int
    cost: Union[int, str]

    @field_validator("cost", mode="before")
    @classmethod
    def _normalize_cost(cls, v: Any) -> Union[int, str]:
        return format_rational(parse_cost(v))


class JobDoc(BaseModel):
    id: int
    release: int
    deadline: int


class InstanceDoc(BaseModel):
    machine_types: List[MachineTypeDoc]
    jobs: List[JobDoc]

    def to_instance(self) -> Instance:
        return Instance(
            jobs=tuple(JobSpec(id=j.id, release=j.release, deadline=j.deadline) for j in self.jobs),
            machine_types=tuple(MachineType(capacity=m.capacity, cost=parse_cost(m.cost)) for m in self.machine_types),
        )

    @classmethod
    def from_instance(cls, instance: Instance) -> "InstanceDoc":
        return cls(
            machine_types=[MachineTypeDoc(capacity=m.capacity, cost=m.cost) for m in instance.machine_types],
            jobs=[
                JobDoc(id=j.id, release=j.release, deadline=j.deadline)
                for j in sorted(instance.jobs, key=lambda j: (j.release, j.id))
            ],
        )


def _field_path(err: ValidationError) -> str:
    first = err.errors()[0]
    where = ".".join(str(p) for p in first["loc"]) or "document"
    return f"{where}: {first['msg']}"


def parse_instance(text: str) -> Instance:
    try:
        doc = InstanceDoc.model_validate_json(text)
    except ValidationError as e:
        raise InstanceError(_field_path(e)) from e
    return doc.to_instance()


def dump_instance(instance: Instance) -> str:
    return InstanceDoc.from_instance(instance).model_dump_json(indent=2)


def read_instance(path: Union[str, Path]) -> Instance:
    return parse_instance(Path(path).read_text(encoding="utf-8"))


def write_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_instance(instance) + "\n", encoding="utf-8")


# -----------------------
# Schedule files
# -----------------------

class BatchDoc(BaseModel):
    type: int
    time: int
    jobs: List[int]


class ScheduleDoc(BaseModel):
    type_system: Literal["real", "virtual"]
    batches: List[BatchDoc]


def dump_schedule(schedule: Schedule) -> str:
    doc = ScheduleDoc(
        type_system=schedule.kind,  # type: ignore[arg-type]
        batches=[BatchDoc(type=b.batch_type, time=b.exec_time, jobs=list(b.job_ids)) for b in schedule.batches],
    )
    return doc.model_dump_json(indent=2)


def parse_schedule(text: str, instance: Instance) -> Schedule:
    """Type indices refer to the canonical menu, or to its ladder for virtual schedules."""
    try:
        doc = ScheduleDoc.model_validate_json(text)
    except ValidationError as e:
        raise ScheduleError(_field_path(e)) from e
    canonical = instance.canonical()
    types: TypeSystem
    if doc.type_system == "virtual":
        types = normalize_types(canonical)
    else:
        types = RealTypes(canonical.machine_types)
    batches = tuple(Batch(batch_type=b.type, exec_time=b.time, job_ids=tuple(b.jobs)) for b in doc.batches)
    return Schedule(batches=batches, type_system=types)


def read_schedule(path: Union[str, Path], instance: Instance) -> Schedule:
    return parse_schedule(Path(path).read_text(encoding="utf-8"), instance)


def write_schedule(schedule: Schedule, path: Union[str, Path]) -> None:
    Path(path).write_text(dump_schedule(schedule) + "\n", encoding="utf-8")


# -----------------------
# Ledgers and interval assignments
# -----------------------

class IntervalDoc(BaseModel):
    left: int
    right: int
    type: int
    jobs: List[int] = Field(validation_alias=AliasChoices("jobs", "charged"))

    def to_interval(self) -> IntervalTuple:
        return IntervalTuple(left=self.left, right=self.right, batch_type=self.type, jobs=tuple(self.jobs))


_intervals = TypeAdapter(List[IntervalDoc])


def dump_intervals(intervals: Iterable[IntervalTuple], key: Literal["jobs", "charged"] = "jobs") -> str:
    rows = [{"left": i.left, "right": i.right, "type": i.batch_type, key: list(i.jobs)} for i in intervals]
    return json.dumps(rows, indent=2)


def parse_intervals(text: str) -> List[IntervalTuple]:
    """Reads both ledger files ("charged") and assignment files ("jobs")."""
    try:
        docs = _intervals.validate_json(text)
    except ValidationError as e:
        raise ScheduleError(_field_path(e)) from e
    return [d.to_interval() for d in docs]


def read_intervals(path: Union[str, Path]) -> List[IntervalTuple]:
    return parse_intervals(Path(path).read_text(encoding="utf-8"))


def write_ledger(intervals: Iterable[IntervalTuple], path: Union[str, Path]) -> None:
    Path(path).write_text(dump_intervals(intervals, key="charged") + "\n", encoding="utf-8")


def write_assignment(intervals: Iterable[IntervalTuple], path: Union[str, Path]) -> None:
    Path(path).write_text(dump_intervals(intervals, key="jobs") + "\n", encoding="utf-8")


# -----------------------
# Reports
# -----------------------

class RunReport(BaseModel):
    instance_id: str
    algorithm: str
    type_system: Literal["real", "virtual"]
    n: int
    cost: str
    baseline: Literal["exact_opt", "adversary_bound", "none"] = "none"
    baseline_value: Optional[str] = None
    ratio: Optional[str] = None
    ratio_float: Optional[float] = None
    wall_time_ms: float
    seed: int

    @classmethod
    def build(
        cls,
        *,
        instance_id: str,
        algorithm: str,
        type_system: str,
        n: int,
        cost: Fraction,
        baseline: str = "none",
        baseline_value: Optional[Fraction] = None,
        wall_time_ms: float,
        seed: int,
    ) -> "RunReport":
        ratio: Optional[Fraction] = None
        if baseline_value is not None:
            if baseline_value == 0:
                if cost != 0:
                    raise ScheduleError(f"cost {rational_str(cost)} against a zero {baseline} baseline")
                ratio = Fraction(1)
            else:
                ratio = cost / baseline_value
        return cls(
            instance_id=instance_id,
            algorithm=algorithm,
            type_system=type_system,  # type: ignore[arg-type]
            n=n,
            cost=rational_str(cost),
            baseline=baseline if baseline_value is not None else "none",  # type: ignore[arg-type]
            baseline_value=rational_str(baseline_value) if baseline_value is not None else None,
            ratio=rational_str(ratio) if ratio is not None else None,
            ratio_float=float(ratio) if ratio is not None else None,
            wall_time_ms=round(wall_time_ms, 3),
            seed=seed,
        )

    def exact_ratio(self) -> Optional[Fraction]:
        return Fraction(self.ratio) if self.ratio is not None else None


REPORT_COLUMNS: Sequence[str] = tuple(RunReport.model_fields)


class BatchCreditDoc(BaseModel):
    batch: int
    type: int
    small_side: str
    large_side: str


class IntervalCreditDoc(BaseModel):
    interval: int
    type: int
    received: str
    required: int


class AuditDoc(BaseModel):
    opt_units: int
    distributed: str
    batches: List[BatchCreditDoc]
    intervals: List[IntervalCreditDoc]

    @classmethod
    def from_report(cls, report: CreditReport) -> "AuditDoc":
        return cls(
            opt_units=report.opt_units,
            distributed=rational_str(report.distributed),
            batches=[
                BatchCreditDoc(
                    batch=b.batch_index,
                    type=b.batch_type,
                    small_side=rational_str(b.small_side),
                    large_side=rational_str(b.large_side),
                )
                for b in report.batches
            ],
            intervals=[
                IntervalCreditDoc(
                    interval=i.interval_index, type=i.batch_type, received=rational_str(i.received), required=i.required
                )
                for i in report.intervals
            ],
        )


def write_audit(report: CreditReport, path: Union[str, Path]) -> None:
    Path(path).write_text(AuditDoc.from_report(report).model_dump_json(indent=2) + "\n", encoding="utf-8")
