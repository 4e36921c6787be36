"""Device <-> server wire protocol: frame types, codec, incremental reader.

Frame layout (all multi-byte integers little-endian):

    magic 0x42 0x56 | kind u8 | reserved u8 = 0x00 | payload_len u32 | payload

Payloads by kind:

    Hello          device_kind u8 (0=Input, 1=Output, 2=Mixed) + serial u32 + version u8
    StatusRequest  (empty)
    StatusResponse state u8 (0=Free, 1=Busy) + epoch u32
    Audio          PCM, 16-bit signed LE mono 8 kHz (even byte count)
    BinaryCommand  pin u8 (2..9) + level u8 (0/1)
    TextCommand    UTF-8 text
    SynthAudio     PCM, same format as Audio
    Bye            (empty)

The transport is any reliable ordered byte stream; here it is TCP, but the
framing would ride a serial link unchanged. Everything in this module is a
pure function plus the per-connection ``FrameReader`` value; nothing is
shared, so one reader per connection needs no locking.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import IntEnum
from typing import Union

MAGIC = b"BV"
HEADER_LEN = 8
MAX_PAYLOAD = 65535
PROTOCOL_VERSION = 1
PIN_MIN = 2
PIN_MAX = 9


class ProtocolError(Exception):
    """Base class for every hard protocol failure."""


class InvalidFrame(ProtocolError):
    """Frame violates a content invariant (bad pin, bad enum byte, ...)."""


class BadMagic(ProtocolError):
    """Stream does not start with the 0x42 0x56 magic."""


class UnknownKind(ProtocolError):
    """Header carries a kind byte outside the defined set."""


class LengthMismatch(ProtocolError):
    """Declared payload length is impossible for the frame kind."""


class NeedMoreData(Exception):
    """Buffer does not yet hold a complete frame. A continuation signal,
    not an error; deliberately outside the ProtocolError hierarchy."""


class FrameKind(IntEnum):
    HELLO = 0x01
    STATUS_REQUEST = 0x02
    STATUS_RESPONSE = 0x03
    AUDIO = 0x04
    BINARY_COMMAND = 0x05
    TEXT_COMMAND = 0x06
    SYNTH_AUDIO = 0x07
    BYE = 0x08


class DeviceKind(IntEnum):
    INPUT = 0
    OUTPUT = 1
    MIXED = 2


class ServerState(IntEnum):
    FREE = 0
    BUSY = 1


@dataclass(frozen=True)
class Hello:
    device_kind: DeviceKind
    serial: int
    version: int = PROTOCOL_VERSION


@dataclass(frozen=True)
class StatusRequest:
    pass


@dataclass(frozen=True)
class StatusResponse:
    state: ServerState
    epoch: int


@dataclass(frozen=True)
class Audio:
    pcm: bytes  # 16-bit signed LE mono 8 kHz


@dataclass(frozen=True)
class BinaryCommand:
    pin: int
    level: int


@dataclass(frozen=True)
class TextCommand:
    text: str


@dataclass(frozen=True)
class SynthAudio:
    pcm: bytes


@dataclass(frozen=True)
class Bye:
    pass


Frame = Union[Hello, StatusRequest, StatusResponse, Audio, BinaryCommand,
              TextCommand, SynthAudio, Bye]

_KIND_OF = {
    Hello: FrameKind.HELLO,
    StatusRequest: FrameKind.STATUS_REQUEST,
    StatusResponse: FrameKind.STATUS_RESPONSE,
    Audio: FrameKind.AUDIO,
    BinaryCommand: FrameKind.BINARY_COMMAND,
    TextCommand: FrameKind.TEXT_COMMAND,
    SynthAudio: FrameKind.SYNTH_AUDIO,
    Bye: FrameKind.BYE,
}


def frame_kind(frame: Frame) -> FrameKind:
    try:
        return _KIND_OF[type(frame)]
    except KeyError:
        raise InvalidFrame(f"not a frame: {frame!r}") from None


def _check_u32(value: int, what: str) -> int:
    if not isinstance(value, int) or not 0 <= value <= 0xFFFFFFFF:
        raise InvalidFrame(f"{what} must be a 32-bit unsigned integer, got {value!r}")
    return value


def _check_pcm(pcm: bytes, what: str) -> bytes:
    if len(pcm) % 2 != 0:
        raise InvalidFrame(f"{what} payload must hold whole 16-bit samples "
                           f"(got {len(pcm)} bytes)")
    return pcm


def _encode_payload(frame: Frame) -> bytes:
    if isinstance(frame, Hello):
        if frame.device_kind not in (0, 1, 2):
            raise InvalidFrame(f"bad device kind {frame.device_kind!r}")
        if frame.version != PROTOCOL_VERSION:
            raise InvalidFrame(f"unsupported protocol version {frame.version}")
        return struct.pack("<BIB", int(frame.device_kind),
                           _check_u32(frame.serial, "serial"), frame.version)
    if isinstance(frame, StatusRequest) or isinstance(frame, Bye):
        return b""
    if isinstance(frame, StatusResponse):
        if frame.state not in (0, 1):
            raise InvalidFrame(f"bad server state {frame.state!r}")
        return struct.pack("<BI", int(frame.state), _check_u32(frame.epoch, "epoch"))
    if isinstance(frame, Audio):
        return _check_pcm(frame.pcm, "Audio")
    if isinstance(frame, SynthAudio):
        return _check_pcm(frame.pcm, "SynthAudio")
    if isinstance(frame, BinaryCommand):
        if not PIN_MIN <= frame.pin <= PIN_MAX:
            raise InvalidFrame(f"pin {frame.pin} outside {PIN_MIN}..{PIN_MAX}")
        if frame.level not in (0, 1):
            raise InvalidFrame(f"level {frame.level!r} not 0 or 1")
        return struct.pack("<BB", frame.pin, frame.level)
    if isinstance(frame, TextCommand):
        return frame.text.encode("utf-8")
    raise InvalidFrame(f"not a frame: {frame!r}")


def encode_frame(frame: Frame) -> bytes:
    """Encode one frame to its exact wire bytes. Raises InvalidFrame if the
    frame violates its invariants."""
    payload = _encode_payload(frame)
    if len(payload) > MAX_PAYLOAD:
        raise InvalidFrame(f"payload of {len(payload)} bytes exceeds {MAX_PAYLOAD}")
    return MAGIC + struct.pack("<BBI", int(frame_kind(frame)), 0, len(payload)) + payload


def _decode_payload(kind: FrameKind, payload: bytes) -> Frame:
    n = len(payload)
    if kind == FrameKind.HELLO:
        if n != 6:
            raise LengthMismatch(f"Hello payload must be 6 bytes, got {n}")
        dk, serial, version = struct.unpack("<BIB", payload)
        if dk not in (0, 1, 2):
            raise InvalidFrame(f"bad device kind byte {dk}")
        if version != PROTOCOL_VERSION:
            raise InvalidFrame(f"unsupported protocol version {version}")
        return Hello(DeviceKind(dk), serial, version)
    if kind == FrameKind.STATUS_REQUEST:
        if n != 0:
            raise LengthMismatch(f"StatusRequest carries no payload, got {n} bytes")
        return StatusRequest()
    if kind == FrameKind.STATUS_RESPONSE:
        if n != 5:
            raise LengthMismatch(f"StatusResponse payload must be 5 bytes, got {n}")
        state, epoch = struct.unpack("<BI", payload)
        if state not in (0, 1):
            raise InvalidFrame(f"bad server state byte {state}")
        return StatusResponse(ServerState(state), epoch)
    if kind == FrameKind.AUDIO or kind == FrameKind.SYNTH_AUDIO:
        if n % 2 != 0:
            raise LengthMismatch(f"audio payload must be an even byte count, got {n}")
        cls = Audio if kind == FrameKind.AUDIO else SynthAudio
        return cls(payload)
    if kind == FrameKind.BINARY_COMMAND:
        if n != 2:
            raise LengthMismatch(f"BinaryCommand payload must be 2 bytes, got {n}")
        pin, level = payload[0], payload[1]
        if not PIN_MIN <= pin <= PIN_MAX:
            raise InvalidFrame(f"pin {pin} outside {PIN_MIN}..{PIN_MAX}")
        if level not in (0, 1):
            raise InvalidFrame(f"level byte {level} not 0 or 1")
        return BinaryCommand(pin, level)
    if kind == FrameKind.TEXT_COMMAND:
        try:
            return TextCommand(payload.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise InvalidFrame(f"TextCommand payload is not UTF-8: {exc}") from None
    if kind == FrameKind.BYE:
        if n != 0:
            raise LengthMismatch(f"Bye carries no payload, got {n} bytes")
        return Bye()
    raise UnknownKind(f"kind {kind} has no decoder")  # unreachable


def decode_frame(data: bytes | bytearray | memoryview) -> tuple[Frame, int]:
    """Decode one frame from the head of ``data``; returns (frame, consumed).

    Raises NeedMoreData when the buffer is merely incomplete; fails fast
    with BadMagic / UnknownKind / LengthMismatch as soon as the prefix is
    provably broken, without waiting for the rest of the frame.
    """
    data = bytes(data[:HEADER_LEN + MAX_PAYLOAD + 1]) if not isinstance(data, bytes) else data
    n = len(data)
    if n >= 1 and data[0] != MAGIC[0]:
        raise BadMagic(f"expected 0x42, got 0x{data[0]:02x}")
    if n >= 2 and data[1] != MAGIC[1]:
        raise BadMagic(f"expected 0x56, got 0x{data[1]:02x}")
    if n >= 3:
        try:
            kind = FrameKind(data[2])
        except ValueError:
            raise UnknownKind(f"kind byte 0x{data[2]:02x} is not defined") from None
    if n >= 4 and data[3] != 0:
        raise InvalidFrame(f"reserved byte must be 0x00, got 0x{data[3]:02x}")
    if n < HEADER_LEN:
        raise NeedMoreData
    (payload_len,) = struct.unpack_from("<I", data, 4)
    if payload_len > MAX_PAYLOAD:
        raise LengthMismatch(f"declared payload of {payload_len} bytes exceeds {MAX_PAYLOAD}")
    total = HEADER_LEN + payload_len
    if n < total:
        raise NeedMoreData
    return _decode_payload(kind, data[HEADER_LEN:total]), total


class FrameReader:
    """Incremental frame parser for one connection.

    ``feed`` accepts bytes in any chunking and returns the frames completed
    so far; the overall frame list is independent of how the stream was
    split. After any protocol error the reader is poisoned and every later
    feed raises ProtocolError. Reader values may move between threads but
    must not be shared concurrently.
    """

    def __init__(self) -> None:
        self._buf = bytearray()
        self._poisoned: ProtocolError | None = None

    @property
    def poisoned(self) -> bool:
        return self._poisoned is not None

    def feed(self, data: bytes) -> list[Frame]:
        if self._poisoned is not None:
            raise ProtocolError(f"stream poisoned: {self._poisoned}")
        self._buf += data
        frames: list[Frame] = []
        while self._buf:
            try:
                frame, consumed = decode_frame(self._buf)
            except NeedMoreData:
                break
            except ProtocolError as exc:
                self._poisoned = exc
                raise
            frames.append(frame)
            del self._buf[:consumed]
        return frames
