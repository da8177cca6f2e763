from __future__ import annotations

import time

import pytest

from busytime.generators import gen_random
from busytime.registry import run_named

pytestmark = pytest.mark.slow


def _timed_main(n: int, seed: int = 1) -> float:
    inst = gen_random(n=n, K=10, window_max=50, seed=seed)
    started = time.perf_counter()
    _, result = run_named("main", inst)
    elapsed = time.perf_counter() - started
    assert len(result.trace) > 0
    return elapsed


def test_main_handles_a_million_jobs():
    assert _timed_main(10**6) <= 10.0


def test_main_scales_sub_quadratically():
    times = [_timed_main(n) for n in (10**5, 2 * 10**5, 4 * 10**5)]
    for small, large in zip(times, times[1:]):
        assert large / small <= 3.0
