"""Progress events of a running experiment and the observer that fans them out."""

from collections.abc import Callable, Coroutine, Sequence
from dataclasses import dataclass, field
from typing import Any, Generic, TypeVar

from ..dto.experiment import Algorithm
from ..util.coro import gather_limited

__all__ = (
    "EventObserver",
    "EventType",
    "AlgorithmStarted",
    "AlgorithmProgressed",
    "AlgorithmFinished",
    "AlgorithmDiverged",
)

T = TypeVar("T")

Callback = Callable[[Any], Coroutine[Any, Any, None]]


@dataclass(slots=True)
class EventObserver(Generic[T]):
    _callbacks: dict[type[Any], list[Callback]] = field(
        init=False, default_factory=dict
    )

    def register(self, types: Sequence[type[T]], callback: Callback) -> None:
        """Call ``callback`` with every event whose exact type is in ``types``."""
        for event_type in dict.fromkeys(types):
            self._callbacks.setdefault(event_type, []).append(callback)

    async def trigger(self, event: T) -> None:
        """Run the callbacks registered for ``event`` concurrently."""
        callbacks = self._callbacks.get(type(event))
        if callbacks:
            await gather_limited(callback(event) for callback in callbacks)


@dataclass(frozen=True, slots=True)
class AlgorithmStarted:
    algorithm: Algorithm
    intervals: int


@dataclass(frozen=True, slots=True)
class AlgorithmProgressed:
    algorithm: Algorithm
    interval: int
    intervals: int
    t: float


@dataclass(frozen=True, slots=True)
class AlgorithmFinished:
    algorithm: Algorithm
    elapsed: float


@dataclass(frozen=True, slots=True)
class AlgorithmDiverged:
    algorithm: Algorithm
    t: float
    message: str


EventType = (
    AlgorithmStarted | AlgorithmProgressed | AlgorithmFinished | AlgorithmDiverged
)
