"""Live terminal view of a running command."""

import asyncio
import time
from abc import abstractmethod
from dataclasses import dataclass, field

from humanize import precisedelta
from rich.console import Group, RenderableType
from rich.live import Live
from rich.padding import Padding
from rich.text import Text

__all__ = ("AbstractRenderer", "LiveView", "elapsed_text")


def elapsed_text(seconds: float) -> str:
    return precisedelta(seconds, minimum_unit="seconds", format="%0.2f")


@dataclass(slots=True)
class AbstractRenderer:
    @abstractmethod
    def compose_renderable(self) -> RenderableType: ...


@dataclass(slots=True, eq=False)
class LiveView:
    """
    Redraws ``renderer`` below a ``[+] title (elapsed)`` heading every
    ``refresh_period`` seconds, from :meth:`start` until :meth:`stop`.
    """

    title: str
    renderer: AbstractRenderer
    refresh_period: float = 0.1
    _live: Live | None = field(init=False, default=None)
    _ticker: "asyncio.Task[None] | None" = field(init=False, default=None)
    _started: float = field(init=False, default_factory=time.monotonic)
    _outcome: str = field(init=False, default="")

    def start(self) -> None:
        """Begin drawing. Must be called from a running event loop."""
        self._started = time.monotonic()
        self._live = Live(self._compose(), auto_refresh=False)
        self._live.start()
        self._ticker = asyncio.get_running_loop().create_task(self._tick())

    async def _tick(self) -> None:
        while True:
            self.refresh()
            await asyncio.sleep(self.refresh_period)

    def refresh(self) -> None:
        if self._live is not None:
            self._live.update(self._compose(), refresh=True)

    def _compose(self) -> RenderableType:
        heading = "[+] %s (%s)" % (
            self.title,
            elapsed_text(time.monotonic() - self._started),
        )
        if self._outcome:
            heading += " " + self._outcome.upper()
        return Group(
            Text(heading), Padding(self.renderer.compose_renderable(), (0, 0, 0, 1))
        )

    def stop(self, outcome: str) -> None:
        """Draw the last frame tagged with ``outcome``; only the first call counts."""
        if self._outcome:
            return
        self._outcome = outcome

        if self._ticker is not None and not self._ticker.done():
            self._ticker.cancel()
        if self._live is not None and self._live.is_started:
            self.refresh()
            self._live.stop()
