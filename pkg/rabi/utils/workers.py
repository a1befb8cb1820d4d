from __future__ import annotations

import asyncio
import logging
from collections.abc import Callable, Sequence
from concurrent.futures import ProcessPoolExecutor
from typing import Any, TypeVar

log = logging.getLogger(__name__)

T = TypeVar("T")


async def run_jobs(func: Callable[..., T], jobs: Sequence[tuple[Any, ...]], workers: int = 1) -> list[T | BaseException]:
    """Run ``func(*job)`` for every job and return results in input order.

    Failures are returned in place of the result so one bad sweep point
    does not abort the rest.
    """
    if workers <= 1 or len(jobs) <= 1:
        results: list[T | BaseException] = []
        for job in jobs:
            try:
                results.append(func(*job))
            except Exception as exc:
                results.append(exc)
        return results

    loop = asyncio.get_running_loop()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        tasks = [loop.run_in_executor(pool, func, *job) for job in jobs]
        log.debug("dispatched %s job(s) to %s worker(s)", len(tasks), workers)
        return await asyncio.gather(*tasks, return_exceptions=True)
