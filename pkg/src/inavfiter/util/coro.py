import asyncio
from collections.abc import Coroutine, Iterable
from typing import Any, TypeVar

__all__ = ("gather_limited",)

T = TypeVar("T")


async def _admit(coro: Coroutine[Any, Any, T], sem: asyncio.Semaphore | None) -> T:
    try:
        if sem is None:
            return await coro
        async with sem:
            return await coro
    finally:
        # no-op once the coroutine ran; silences "never awaited" on cancellation
        coro.close()


async def gather_limited(
    coros: Iterable[Coroutine[Any, Any, T]], max_workers: int = 0
) -> list[T]:
    """
    Run ``coros`` in one task group, at most ``max_workers`` at a time, and
    return their results in input order.

    Args:
        max_workers: Concurrency limit; 0 runs everything at once.

    Raises:
        ExceptionGroup: A coroutine failed; the others were cancelled.
    """
    if max_workers < 0:
        raise ValueError("max_workers must be >= 0, got %d" % max_workers)
    sem = asyncio.BoundedSemaphore(max_workers) if max_workers else None

    async with asyncio.TaskGroup() as tg:
        tasks = [tg.create_task(_admit(coro, sem)) for coro in coros]
    return [task.result() for task in tasks]
