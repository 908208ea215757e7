import asyncio

from inavfiter.harness import event


def test_callbacks_follow_event_types():
    seen: list[tuple[str, object]] = []

    async def on_progress(ev: event.AlgorithmProgressed) -> None:
        seen.append(("progress", ev.interval))

    async def on_end(ev: event.AlgorithmFinished | event.AlgorithmDiverged) -> None:
        seen.append(("end", ev.algorithm))

    observer = event.EventObserver[event.EventType]()
    observer.register((event.AlgorithmProgressed,), on_progress)
    observer.register((event.AlgorithmFinished, event.AlgorithmDiverged), on_end)

    async def main() -> None:
        await observer.trigger(event.AlgorithmStarted("inavfiter", 12))
        await observer.trigger(event.AlgorithmProgressed("inavfiter", 3, 12, 0.24))
        await observer.trigger(event.AlgorithmFinished("inavfiter", 0.5))
        await observer.trigger(event.AlgorithmDiverged("typical2", 1.0, "nan"))

    asyncio.run(main())
    assert seen == [("progress", 3), ("end", "inavfiter"), ("end", "typical2")]


def test_all_callbacks_of_a_type_run():
    calls: list[int] = []

    def make(i: int):
        async def callback(_: event.AlgorithmStarted) -> None:
            calls.append(i)

        return callback

    observer = event.EventObserver[event.EventType]()
    for i in range(3):
        observer.register((event.AlgorithmStarted, event.AlgorithmStarted), make(i))

    asyncio.run(observer.trigger(event.AlgorithmStarted("improved2", 1)))
    assert sorted(calls) == [0, 1, 2]
