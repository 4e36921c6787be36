"""Time bases. Scenario runs use VirtualClock (integer milliseconds advanced
by the stepper, fully deterministic); live mode uses WallClock."""

from __future__ import annotations

import time


class VirtualClock:
    def __init__(self, start_ms: int = 0):
        self.now_ms = start_ms

    def advance(self, delta_ms: int) -> int:
        if delta_ms < 0:
            raise ValueError("clock cannot run backwards")
        self.now_ms += delta_ms
        return self.now_ms


class WallClock:
    def __init__(self):
        self._t0 = time.monotonic()

    @property
    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    def advance(self, delta_ms: int) -> int:
        """Wall time advances on its own; stepping is a no-op."""
        return self.now_ms
