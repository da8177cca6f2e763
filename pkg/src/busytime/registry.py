from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List, Literal, Optional, Tuple

from busytime.algorithms import GreedyAgreeable, MainAlgorithm
from busytime.baselines import GreedyGeneral, Lazy, MostCostEfficient, RampUp
from busytime.engine import InstanceSource, OnlineAlgorithm, RunResult, StaticSource, run_online
from busytime.errors import BusyTimeError
from busytime.instance import Instance, RealTypes, TypeSystem, normalize_types


@dataclass(frozen=True)
class AlgorithmSpec:
    name: str
    description: str
    type_system: Literal["ladder", "real"]
    factory: Callable[..., OnlineAlgorithm]


def build_algorithms() -> Dict[str, AlgorithmSpec]:
    specs = [
        AlgorithmSpec(
            name="main",
            description="Nested-interval rung selection on the normalized ladder (8-competitive).",
            type_system="ladder",
            factory=MainAlgorithm,
        ),
        AlgorithmSpec(
            name="greedy_agreeable",
            description="Clear all waiting jobs with the cheapest machine multiset at each deadline.",
            type_system="real",
            factory=GreedyAgreeable,
        ),
        AlgorithmSpec(
            name="greedy_general",
            description="The greedy rule on instances without agreeable deadlines.",
            type_system="real",
            factory=GreedyGeneral,
        ),
        AlgorithmSpec(
            name="most_cost_efficient",
            description="One machine per forced dispatch, the best cost per schedulable job.",
            type_system="real",
            factory=MostCostEfficient,
        ),
        AlgorithmSpec(
            name="lazy",
            description="Serve only jobs due now unless the largest machine can be filled.",
            type_system="real",
            factory=Lazy,
        ),
        AlgorithmSpec(
            name="ramp_up",
            description="Largest machine affordable from the spend since the system was last empty.",
            type_system="real",
            factory=RampUp,
        ),
    ]
    return {s.name: s for s in specs}


def algorithm_names() -> List[str]:
    return list(build_algorithms())


def prepare(name: str, instance: Instance, n: Optional[int] = None) -> Tuple[OnlineAlgorithm, TypeSystem]:
    """Instantiate algorithm `name` on the type system it is analysed in.

    The machine menu is canonicalized first, so type indices refer to
    `instance.canonical().machine_types`.
    """
    specs = build_algorithms()
    if name not in specs:
        raise BusyTimeError(f"unknown algorithm: {name} (known: {', '.join(specs)})")
    spec = specs[name]
    canonical = instance.canonical()
    types: TypeSystem
    if spec.type_system == "ladder":
        types = normalize_types(canonical, n)
    else:
        types = RealTypes(canonical.machine_types)
    return spec.factory(types), types


def run_named(
    name: str,
    instance: Instance,
    source: Optional[InstanceSource] = None,
    n: Optional[int] = None,
) -> Tuple[OnlineAlgorithm, RunResult]:
    algorithm, types = prepare(name, instance, n)
    result = run_online(source or StaticSource(instance), algorithm, types)
    return algorithm, result
