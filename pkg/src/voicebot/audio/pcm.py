"""PCM primitives for the one audio format this system speaks:
16-bit signed little-endian mono at 8000 Hz, processed in 256-sample
(32 ms) frames.
"""

from __future__ import annotations

import io
import sys
import wave
from array import array
from dataclasses import dataclass, field

from voicebot import _kernels

SAMPLE_RATE = 8000
FRAME_SAMPLES = 256
FRAME_MS = 32  # 256 samples at 8 kHz


class AudioError(Exception):
    pass


class WrongFrameSize(AudioError):
    pass


class WavFormatError(AudioError):
    pass


def new_samples(n: int = 0) -> array:
    """A writable int16 sample buffer of n zeros."""
    return array("h", bytes(2 * n))


def samples_from_bytes(data: bytes) -> array:
    buf = array("h")
    buf.frombytes(data)
    if sys.byteorder == "big":
        buf.byteswap()
    return buf


def samples_to_bytes(samples: array) -> bytes:
    if sys.byteorder == "big":
        samples = array("h", samples)
        samples.byteswap()
    return samples.tobytes()


@dataclass
class AudioClip:
    """A mono 16-bit clip. ``samples`` is an array('h')."""

    samples: array = field(default_factory=new_samples)
    sample_rate: int = SAMPLE_RATE

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_ms(self) -> float:
        return 1000.0 * len(self.samples) / self.sample_rate

    def to_bytes(self) -> bytes:
        return samples_to_bytes(self.samples)

    @classmethod
    def from_bytes(cls, data: bytes, sample_rate: int = SAMPLE_RATE) -> "AudioClip":
        return cls(samples_from_bytes(data), sample_rate)


def rms(frame) -> int:
    """Root-mean-square of one 256-sample frame, rounded to nearest integer."""
    if len(frame) != FRAME_SAMPLES:
        raise WrongFrameSize(f"expected {FRAME_SAMPLES} samples, got {len(frame)}")
    return _kernels.rms_frame(frame)


def mix_gain(clip: AudioClip, volume: int) -> AudioClip:
    """Scale by volume/100 with saturation at the int16 limits."""
    if not 0 <= volume <= 100:
        raise ValueError(f"volume {volume} outside 0..100")
    out = new_samples(len(clip.samples))
    _kernels.scale_saturate_into(clip.samples, out, volume, 100)
    return AudioClip(out, clip.sample_rate)


def wav_bytes(clip: AudioClip) -> bytes:
    """Canonical 44-byte-header WAV encoding of a clip."""
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(1)
        w.setsampwidth(2)
        w.setframerate(clip.sample_rate)
        w.writeframes(clip.to_bytes())
    return buf.getvalue()


def clip_from_wav_bytes(data: bytes, expect_rate: int = SAMPLE_RATE) -> AudioClip:
    try:
        with wave.open(io.BytesIO(data), "rb") as w:
            channels = w.getnchannels()
            width = w.getsampwidth()
            rate = w.getframerate()
            frames = w.readframes(w.getnframes())
    except (wave.Error, EOFError) as exc:
        raise WavFormatError(f"not a readable WAV: {exc}") from None
    if channels != 1 or width != 2:
        raise WavFormatError(f"need 16-bit mono, got {width * 8}-bit {channels}-channel")
    if expect_rate is not None and rate != expect_rate:
        raise WavFormatError(f"need {expect_rate} Hz, got {rate} Hz")
    return AudioClip.from_bytes(frames, rate)


def read_wav(path, expect_rate: int = SAMPLE_RATE) -> AudioClip:
    with open(path, "rb") as fh:
        return clip_from_wav_bytes(fh.read(), expect_rate)


def write_wav(clip: AudioClip, path) -> None:
    with open(path, "wb") as fh:
        fh.write(wav_bytes(clip))
