"""JSON-lines event trace: one timestamped event per line, replayable.

Events are plain dicts with ``t`` (milliseconds) and ``type`` first, then
event-specific fields in a fixed order, so identical runs serialize to
identical bytes. Sinks receive every event; fields passed as ``ops_extra``
reach sinks only (used for audio payloads that belong on the live feed but
would bloat the trace file).
"""

from __future__ import annotations

import json
from typing import Callable, Optional


class MalformedTrace(Exception):
    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no


class Trace:
    def __init__(self, clock, path=None):
        self._clock = clock
        self.events: list[dict] = []
        self._file = open(path, "w", encoding="utf-8") if path else None
        self._sinks: list[Callable[[dict], None]] = []

    def add_sink(self, sink: Callable[[dict], None]) -> None:
        self._sinks.append(sink)

    def emit(self, type_: str, ops_extra: Optional[dict] = None, **fields) -> dict:
        event = {"t": self._clock.now_ms, "type": type_}
        event.update(fields)
        self.events.append(event)
        if self._file is not None:
            self._file.write(json.dumps(event, separators=(",", ":")) + "\n")
        if self._sinks:
            feed = dict(event)
            if ops_extra:
                feed.update(ops_extra)
            for sink in self._sinks:
                sink(feed)
        return event

    def close(self) -> None:
        if self._file is not None:
            self._file.close()
            self._file = None


def read_trace(path) -> list[dict]:
    """Parse a JSON-lines trace; raises MalformedTrace naming the 1-based
    line number of the first broken line."""
    events = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                event = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedTrace(line_no, f"invalid JSON ({exc.msg})") from None
            if not isinstance(event, dict) or "t" not in event or "type" not in event:
                raise MalformedTrace(line_no, "event must be an object with "
                                              "'t' and 'type'")
            events.append(event)
    return events
