"""Energy-based voice activity detection over 32 ms frames.

An utterance starts on the first frame whose RMS reaches the threshold and
ends once 200 ms of sub-threshold audio accumulate (7 consecutive frames at
32 ms each). Pure function of (state, frame); no hidden clocks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum

from voicebot.audio.pcm import FRAME_MS, rms

DEFAULT_THRESHOLD = 1000
HANGOVER_MS = 200


class VadEvent(Enum):
    NONE = "none"
    UTTERANCE_START = "utterance_start"
    UTTERANCE_END = "utterance_end"


@dataclass(frozen=True)
class VadState:
    threshold: int = DEFAULT_THRESHOLD
    active: bool = False
    hangover_ms: int = 0  # silence accumulated while active; reset by any loud frame


def vad_step(state: VadState, frame) -> tuple[VadState, VadEvent]:
    level = rms(frame)
    if not state.active:
        if level >= state.threshold:
            return replace(state, active=True, hangover_ms=0), VadEvent.UTTERANCE_START
        return state, VadEvent.NONE
    if level >= state.threshold:
        if state.hangover_ms == 0:
            return state, VadEvent.NONE
        return replace(state, hangover_ms=0), VadEvent.NONE
    hangover = state.hangover_ms + FRAME_MS
    if hangover >= HANGOVER_MS:  # 7th consecutive silent frame: 224 ms >= 200 ms
        return replace(state, active=False, hangover_ms=0), VadEvent.UTTERANCE_END
    return replace(state, hangover_ms=hangover), VadEvent.NONE
