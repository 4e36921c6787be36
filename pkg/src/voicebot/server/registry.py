"""Device registry and per-connection sessions.

Every Input or Mixed device gets one exclusive recognition-engine id at
registration; engine ids come from a monotone counter and are never
reissued, so a released id can never collide with a live one.
"""

from __future__ import annotations

import itertools
from array import array
from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from voicebot.audio.vad import VadState
from voicebot.protocol import (
    DeviceKind,
    Frame,
    Hello,
    PROTOCOL_VERSION,
    ServerState,
    StatusResponse,
)
from voicebot.server.schema import SUPPORTED_LOCALES


class RegistryError(Exception):
    pass


class DuplicateSerial(RegistryError):
    pass


class UnsupportedVersion(RegistryError):
    pass


@dataclass
class DeviceDescriptor:
    kind: DeviceKind
    serial: int
    min_audio_level: int = 1000
    volume: int = 100
    locale: str = "en"

    def __post_init__(self):
        if self.locale not in SUPPORTED_LOCALES:
            raise RegistryError(f"locale {self.locale!r} is not supported")
        if not 0 <= self.min_audio_level <= 32767:
            raise RegistryError(f"min_audio_level {self.min_audio_level} "
                                f"outside 0..32767")
        if not 0 <= self.volume <= 100:
            raise RegistryError(f"volume {self.volume} outside 0..100")


@dataclass
class Session:
    device: DeviceDescriptor
    sre_id: Optional[int]  # present iff the device can send audio
    state: ServerState = ServerState.FREE
    epoch: int = 0
    vad: VadState = field(default_factory=VadState)
    capturing: bool = False
    utterance: array = field(default_factory=lambda: array("h"))
    partial: array = field(default_factory=lambda: array("h"))
    backlog: array = field(default_factory=lambda: array("h"))
    queued_texts: deque = field(default_factory=deque)
    outbound: deque = field(default_factory=deque)
    closed: bool = False

    @property
    def serial(self) -> int:
        return self.device.serial

    def send(self, frame: Frame) -> None:
        self.outbound.append(frame)

    def take_outbound(self) -> list[Frame]:
        frames = list(self.outbound)
        self.outbound.clear()
        return frames

    def set_state(self, state: ServerState) -> None:
        if state != self.state:
            self.state = state
            self.epoch = (self.epoch + 1) & 0xFFFFFFFF


class Registry:
    """Connected devices keyed by serial. Single-writer: mutated only at
    registration and release."""

    def __init__(self, defaults: Optional[dict[int, dict]] = None):
        self._sessions: dict[int, Session] = {}
        self._sre_ids = itertools.count(1)
        self._overrides = defaults or {}

    def register(self, hello: Hello,
                 descriptor: Optional[DeviceDescriptor] = None) -> Session:
        """Create a session for a Hello; allocates a fresh engine id for
        Input/Mixed devices and queues the initial Free status."""
        if hello.version != PROTOCOL_VERSION:
            raise UnsupportedVersion(f"protocol version {hello.version}")
        if hello.serial in self._sessions:
            raise DuplicateSerial(f"serial {hello.serial} already connected")
        if descriptor is None:
            overrides = self._overrides.get(hello.serial, {})
            descriptor = DeviceDescriptor(hello.device_kind, hello.serial, **overrides)
        sre_id = None
        if hello.device_kind in (DeviceKind.INPUT, DeviceKind.MIXED):
            sre_id = next(self._sre_ids)
        session = Session(descriptor, sre_id,
                          vad=VadState(threshold=descriptor.min_audio_level))
        session.send(StatusResponse(ServerState.FREE, session.epoch))
        self._sessions[hello.serial] = session
        return session

    def release(self, serial: int) -> None:
        session = self._sessions.pop(serial, None)
        if session is not None:
            session.closed = True

    def get(self, serial: int) -> Optional[Session]:
        return self._sessions.get(serial)

    def sessions(self) -> list[Session]:
        return list(self._sessions.values())

    def live_sre_ids(self) -> list[int]:
        return [s.sre_id for s in self._sessions.values() if s.sre_id is not None]
