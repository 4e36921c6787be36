"""Audio: fixed-format PCM primitives, voice activity detection, and the
deterministic phrase codec that stands in for speech recognition/synthesis.
"""

from voicebot.audio.pcm import (
    AudioClip,
    AudioError,
    FRAME_MS,
    FRAME_SAMPLES,
    SAMPLE_RATE,
    WavFormatError,
    WrongFrameSize,
    clip_from_wav_bytes,
    mix_gain,
    new_samples,
    read_wav,
    rms,
    wav_bytes,
    write_wav,
)
from voicebot.audio.vad import VadEvent, VadState, vad_step
from voicebot.audio.codec import (
    AmbiguousWord,
    CodecError,
    CodecTable,
    DEFAULT_TABLE,
    EmptyText,
    NoUtterance,
    UnknownWord,
    decode_phrase,
    encode_phrase,
    fnv1a32,
    word_triple,
)

__all__ = [
    "AudioClip", "AudioError", "FRAME_MS", "FRAME_SAMPLES", "SAMPLE_RATE",
    "WavFormatError", "WrongFrameSize", "clip_from_wav_bytes", "mix_gain",
    "new_samples", "read_wav", "rms", "wav_bytes", "write_wav",
    "VadEvent", "VadState", "vad_step",
    "AmbiguousWord", "CodecError", "CodecTable", "DEFAULT_TABLE", "EmptyText",
    "NoUtterance", "UnknownWord", "decode_phrase", "encode_phrase",
    "fnv1a32", "word_triple",
]
