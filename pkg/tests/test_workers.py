from __future__ import annotations

import asyncio

from rabi.utils.workers import run_jobs


def test_inline_jobs_keep_order_and_capture_failures() -> None:
    results = asyncio.run(run_jobs(pow, [(2, 3), (0, -1), (3, 2)]))
    assert results[0] == 8
    assert isinstance(results[1], ZeroDivisionError)
    assert results[2] == 9


def test_process_pool_keeps_input_order() -> None:
    jobs = [(n, 2) for n in range(12)]
    results = asyncio.run(run_jobs(pow, jobs, workers=3))
    assert results == [n * n for n in range(12)]


def test_process_pool_returns_failures_in_place() -> None:
    results = asyncio.run(run_jobs(pow, [(2, 2), (0, -1)], workers=2))
    assert results[0] == 4
    assert isinstance(results[1], ZeroDivisionError)


def test_no_jobs() -> None:
    assert asyncio.run(run_jobs(pow, [], workers=4)) == []
