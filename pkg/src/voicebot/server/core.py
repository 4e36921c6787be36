"""The server engine: frame handling, recognition, and the timed dispatcher.

Transport-free by design. A network layer (or the in-process rig) feeds
decoded frames in via ``handle_frame``, drives ``tick`` on the shared 10 ms
scheduler grid, and drains each session's outbound frames. Devices are
served independently: each input device owns an exclusive recognition
engine and its own Free/Busy gate, so one robot mid-dispatch never blocks
another.

The console is a built-in pseudo input device (serial 0): operator text and
uploaded audio enter through the exact same recognition path as device
traffic, which is what makes the text and audio routes provably equivalent.
"""

from __future__ import annotations

import base64
import heapq
import itertools
from array import array
from typing import Optional

from voicebot.audio.codec import decode_phrase, DEFAULT_TABLE, CodecError, encode_phrase
from voicebot.audio.pcm import (
    AudioClip,
    FRAME_SAMPLES,
    mix_gain,
    samples_from_bytes,
    wav_bytes,
)
from voicebot.audio.vad import VadEvent, vad_step
from voicebot.protocol import (
    Audio,
    BinaryCommand,
    Bye,
    DeviceKind,
    Frame,
    Hello,
    ServerState,
    StatusRequest,
    StatusResponse,
    SynthAudio,
    TextCommand,
)
from voicebot.server.registry import DeviceDescriptor, Registry, Session
from voicebot.server.schema import (
    CommandSpec,
    SendBinary,
    SendText,
    SentenceEntry,
    Synthesize,
    VoiceSchema,
    match_sentence,
    normalize_sentence,
)
from voicebot.server.trace import Trace

CONSOLE_SERIAL = 0  # reserved for the operator console's pseudo device
ACK_CHUNK_SAMPLES = 1024
DEFAULT_TICK_MS = 10


class ProtocolViolation(Exception):
    pass


def ceil_to_tick(t_ms: int, tick_ms: int) -> int:
    return ((t_ms + tick_ms - 1) // tick_ms) * tick_ms


def schedule_commands(entry: SentenceEntry, now_ms: int,
                      tick_ms: int = DEFAULT_TICK_MS) -> list[tuple[int, CommandSpec]]:
    """Fire times for a sentence's commands: each command fires one declared
    delay after the previous one, rounded up to the scheduler grid, so every
    observed gap lands in [delay, delay + tick]."""
    fires = []
    t = now_ms
    for cmd in entry.commands:
        t = ceil_to_tick(t + cmd.delay_ms, tick_ms)
        fires.append((t, cmd))
    return fires


def _synthesize(text: str, volume: int) -> tuple[AudioClip, list[SynthAudio]]:
    clip = mix_gain(encode_phrase(normalize_sentence(text)), volume)
    frames = []
    data = clip.to_bytes()
    step = 2 * ACK_CHUNK_SAMPLES
    for off in range(0, len(data), step):
        frames.append(SynthAudio(data[off:off + step]))
    return clip, frames


def synthesize_ack(text: str, volume: int) -> list[SynthAudio]:
    """Speech acknowledgement as wire frames: the encoded phrase at the
    device's volume, chunked into frames of at most 1024 samples."""
    return _synthesize(text, volume)[1]


class ServerCore:
    def __init__(self, schema: VoiceSchema, clock, trace: Optional[Trace] = None,
                 tick_ms: int = DEFAULT_TICK_MS,
                 device_overrides: Optional[dict[int, dict]] = None):
        self.schema = schema
        self.clock = clock
        self.tick_ms = tick_ms
        self.trace = trace if trace is not None else Trace(clock)
        self.registry = Registry(device_overrides)
        self._queue: list = []  # (fire_ms, seq, kind, origin_serial, payload)
        self._seq = itertools.count()
        self.console = self.registry.register(
            Hello(DeviceKind.INPUT, CONSOLE_SERIAL),
            DeviceDescriptor(DeviceKind.INPUT, CONSOLE_SERIAL))

    # -- registration ------------------------------------------------------

    def connect(self, hello: Hello) -> Session:
        session = self.registry.register(hello)
        self.trace.emit("device_connected", serial=hello.serial,
                        kind=hello.device_kind.name.lower(), sre_id=session.sre_id)
        return session

    def disconnect(self, serial: int) -> None:
        if self.registry.get(serial) is not None:
            self.trace.emit("device_bye", serial=serial)
            self.registry.release(serial)

    # -- frame path --------------------------------------------------------

    def handle_frame(self, serial: int, frame: Frame) -> None:
        session = self.registry.get(serial)
        if session is None:
            raise ProtocolViolation(f"no session for serial {serial}")
        if isinstance(frame, StatusRequest):
            session.send(StatusResponse(session.state, session.epoch))
        elif isinstance(frame, Audio):
            if session.device.kind == DeviceKind.OUTPUT:
                raise ProtocolViolation("Audio from an Output device")
            self._on_audio(session, frame.pcm)
        elif isinstance(frame, TextCommand):
            if session.device.kind == DeviceKind.OUTPUT:
                raise ProtocolViolation("TextCommand from an Output device")
            self.submit_text(serial, frame.text)
        elif isinstance(frame, Bye):
            self.disconnect(serial)
        elif isinstance(frame, Hello):
            raise ProtocolViolation("second Hello on an open session")
        else:
            raise ProtocolViolation(f"server-bound stream cannot carry "
                                    f"{type(frame).__name__}")

    def submit_text(self, origin_serial: int, text: str) -> None:
        session = self.registry.get(origin_serial)
        if session is None:
            raise ProtocolViolation(f"no session for serial {origin_serial}")
        if session.state == ServerState.BUSY:
            session.queued_texts.append(text)
            return
        self._recognize_text(session, text)

    def submit_audio(self, origin_serial: int, samples: array) -> None:
        """Inject raw samples (console upload path) as if they had arrived
        as Audio frames, followed by enough silence to close the VAD."""
        session = self.registry.get(origin_serial)
        if session is None:
            raise ProtocolViolation(f"no session for serial {origin_serial}")
        padded = array("h", samples)
        padded.extend([0] * (8 * FRAME_SAMPLES))
        self._on_audio(session, None, padded)

    # -- recognition -------------------------------------------------------

    def _on_audio(self, session: Session, pcm: Optional[bytes],
                  samples: Optional[array] = None) -> None:
        if samples is None:
            samples = samples_from_bytes(pcm)
        if session.state == ServerState.BUSY:
            session.backlog.extend(samples)
            return
        self._feed_vad(session, samples)

    def _feed_vad(self, session: Session, samples: array) -> None:
        session.partial.extend(samples)
        while len(session.partial) >= FRAME_SAMPLES and session.state == ServerState.FREE:
            frame = session.partial[:FRAME_SAMPLES]
            del session.partial[:FRAME_SAMPLES]
            session.vad, event = vad_step(session.vad, frame)
            if event == VadEvent.UTTERANCE_START:
                session.capturing = True
                session.utterance = array("h")
            if session.capturing:
                session.utterance.extend(frame)
            if event == VadEvent.UTTERANCE_END:
                session.capturing = False
                utterance = session.utterance
                session.utterance = array("h")
                self._recognize_audio(session, utterance)

    def _recognize_audio(self, session: Session, utterance: array) -> None:
        try:
            text = decode_phrase(AudioClip(utterance), DEFAULT_TABLE,
                                 self.schema.vocabulary)
        except CodecError as exc:
            self.trace.emit("recognition_error", origin=session.serial,
                            error=type(exc).__name__, detail=str(exc))
            return
        self.trace.emit("recognized", origin=session.serial, text=text,
                        source="audio")
        self._match_and_dispatch(session, text)

    def _recognize_text(self, session: Session, text: str) -> None:
        text = normalize_sentence(text)
        self.trace.emit("recognized", origin=session.serial, text=text,
                        source="text")
        self._match_and_dispatch(session, text)

    def _match_and_dispatch(self, session: Session, text: str) -> None:
        entry = match_sentence(self.schema, text)
        if entry is None:
            self.trace.emit("no_match", origin=session.serial, text=text)
            return
        self._dispatch_entry(session, entry)

    def _dispatch_entry(self, session: Session, entry: SentenceEntry) -> None:
        now = self.clock.now_ms
        timeline = schedule_commands(entry, now, self.tick_ms)
        self._set_state(session, ServerState.BUSY)
        for idx, (fire, cmd) in enumerate(timeline):
            heapq.heappush(self._queue, (fire, next(self._seq), "command",
                                         session.serial, (entry, idx, cmd)))
        last_fire = timeline[-1][0]
        if entry.ack_text:
            heapq.heappush(self._queue, (last_fire, next(self._seq), "ack",
                                         session.serial, entry.ack_text))
        heapq.heappush(self._queue, (last_fire, next(self._seq), "complete",
                                     session.serial, None))

    def _set_state(self, session: Session, state: ServerState) -> None:
        if session.state == state:
            return
        session.set_state(state)
        self.trace.emit("status", serial=session.serial, state=state.name.lower(),
                        epoch=session.epoch)
        # unsolicited push so the device's Free/Busy gate tracks promptly
        session.send(StatusResponse(session.state, session.epoch))

    # -- dispatcher --------------------------------------------------------

    def tick(self, now_ms: Optional[int] = None) -> None:
        now = self.clock.now_ms if now_ms is None else now_ms
        while self._queue and self._queue[0][0] <= now:
            fire, _, kind, origin, payload = heapq.heappop(self._queue)
            if kind == "command":
                entry, idx, cmd = payload
                self._execute_command(origin, entry, idx, cmd)
            elif kind == "ack":
                self._execute_ack(origin, payload)
            else:
                self._complete(origin)

    def _execute_command(self, origin: int, entry: SentenceEntry, idx: int,
                         cmd: CommandSpec) -> None:
        action = cmd.action
        target = self.registry.get(cmd.target_serial)
        if isinstance(action, SendBinary):
            self.trace.emit("dispatch", origin=origin, sentence=entry.sentence,
                            idx=idx, action="binary", target=cmd.target_serial,
                            pin=action.pin, level=action.level)
            if target is None:
                self._target_offline(cmd.target_serial)
                return
            target.send(BinaryCommand(action.pin, action.level))
        elif isinstance(action, SendText):
            self.trace.emit("dispatch", origin=origin, sentence=entry.sentence,
                            idx=idx, action="text", target=cmd.target_serial,
                            text=action.text)
            if target is None:
                self._target_offline(cmd.target_serial)
                return
            target.send(TextCommand(action.text))
        elif isinstance(action, Synthesize):
            self.trace.emit("dispatch", origin=origin, sentence=entry.sentence,
                            idx=idx, action="synth", target=cmd.target_serial,
                            text=action.text)
            if target is None:
                self._target_offline(cmd.target_serial)
                return
            self._send_speech(target, action.text)

    def _execute_ack(self, origin: int, text: str) -> None:
        session = self.registry.get(origin)
        if session is None:
            self._target_offline(origin)
            return
        self._send_speech(session, text)

    def _send_speech(self, session: Session, text: str) -> None:
        clip, frames = _synthesize(text, session.device.volume)
        for frame in frames:
            session.send(frame)
        self.trace.emit(
            "ack_audio", target=session.serial, text=text, samples=len(clip),
            ops_extra={"wav_base64": base64.b64encode(wav_bytes(clip)).decode("ascii")})

    def _complete(self, origin: int) -> None:
        session = self.registry.get(origin)
        if session is None:
            return
        self._set_state(session, ServerState.FREE)
        while session.queued_texts and session.state == ServerState.FREE:
            self._recognize_text(session, session.queued_texts.popleft())
        if session.state == ServerState.FREE and len(session.backlog):
            backlog = session.backlog
            session.backlog = array("h")
            self._feed_vad(session, backlog)

    def _target_offline(self, serial: int) -> None:
        self.trace.emit("target_offline", target=serial)
