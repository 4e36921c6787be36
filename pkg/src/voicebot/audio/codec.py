"""Deterministic phrase codec: the stand-in for speech recognition and
synthesis that makes the whole audio path testable offline.

Every word maps to a triple of tone-bin indices derived from its FNV-1a
hash; encoding plays the three 50 ms tones back to back, decoding segments
by silence and identifies each 50 ms piece's dominant bin with Goertzel
magnitudes over the 32-bin table. Tones sit on 100 Hz steps from 500 Hz,
all comfortably inside a speaker's band and below the 4 kHz Nyquist limit.
Recognition is exact: a decoded triple either names a unique vocabulary
word or the decode is rejected, never guessed.
"""

from __future__ import annotations

import math
from array import array
from dataclasses import dataclass
from functools import lru_cache

from voicebot import _kernels
from voicebot.audio.pcm import SAMPLE_RATE, AudioClip, AudioError, new_samples

NUM_BINS = 32
TONE_SAMPLES = 400  # 50 ms at 8 kHz
GAP_SAMPLES = 200  # 25 ms between words
TAIL_SAMPLES = 2000  # 250 ms trailing silence
TONE_AMPLITUDE = 16000

# Silence segmentation for decode: 50-sample windows, active at RMS >= 2000.
# Keeps tone windows (RMS ~11300) and 20 dB noise floors (~920) far apart.
SEG_WINDOW = 50
SEG_RMS_THRESHOLD = 2000
_SEG_THRESH_SUMSQ = SEG_WINDOW * SEG_RMS_THRESHOLD * SEG_RMS_THRESHOLD


class CodecError(AudioError):
    pass


class EmptyText(CodecError):
    pass


class NoUtterance(CodecError):
    pass


class UnknownWord(CodecError):
    pass


class AmbiguousWord(CodecError):
    pass


@dataclass(frozen=True)
class CodecTable:
    """32 tone frequencies, bin k at 500 + 100*k Hz."""

    bins: tuple[int, ...] = tuple(500 + 100 * k for k in range(NUM_BINS))


DEFAULT_TABLE = CodecTable()


def fnv1a32(data: bytes) -> int:
    h = 2166136261
    for b in data:
        h ^= b
        h = (h * 16777619) & 0xFFFFFFFF
    return h


def word_triple(word: str) -> tuple[int, int, int]:
    """The word's three tone-bin indices: h mod 32, (h div 32) mod 32,
    (h div 1024) mod 32, for h = FNV-1a of the UTF-8 bytes."""
    h = fnv1a32(word.encode("utf-8"))
    return (h & 31, (h >> 5) & 31, (h >> 10) & 31)


@lru_cache(maxsize=8)
def _goertzel_coeffs(bins: tuple[int, ...], rate: int) -> array:
    return array("d", (2.0 * math.cos(2.0 * math.pi * f / rate) for f in bins))


def encoded_length(word_count: int) -> int:
    """Sample count of an encoded phrase; exact function of word count."""
    if word_count < 1:
        raise EmptyText("no words")
    return word_count * 3 * TONE_SAMPLES + (word_count - 1) * GAP_SAMPLES + TAIL_SAMPLES


def encode_phrase(text: str, table: CodecTable = DEFAULT_TABLE) -> AudioClip:
    """Synthesize a normalized sentence: per word three 50 ms tones at its
    bin triple (amplitude 16000), 25 ms of silence between words, 250 ms
    of trailing silence."""
    words = text.split()
    if not words:
        raise EmptyText("cannot encode empty text")
    out = new_samples(encoded_length(len(words)))
    pos = 0
    for w, word in enumerate(words):
        if w > 0:
            pos += GAP_SAMPLES
        for bin_idx in word_triple(word):
            _kernels.synth_tone_into(out, pos, float(table.bins[bin_idx]),
                                     TONE_SAMPLES, TONE_AMPLITUDE, SAMPLE_RATE)
            pos += TONE_SAMPLES
    return AudioClip(out)


def _active_spans(samples) -> list[tuple[int, int]]:
    """Contiguous loud regions as (start, end) sample offsets. A span closes
    after two consecutive quiet windows, so the 4-window inter-word gaps
    separate words while single boundary windows cannot split a tone run."""
    flags = _kernels.window_activity(samples, SEG_WINDOW, _SEG_THRESH_SUMSQ)
    spans: list[tuple[int, int]] = []
    start = end = -1
    quiet = 0
    for w, flag in enumerate(flags):
        if flag:
            if start < 0:
                start = w
            end = w
            quiet = 0
        elif start >= 0:
            quiet += 1
            if quiet >= 2:
                spans.append((start * SEG_WINDOW, (end + 1) * SEG_WINDOW))
                start = -1
    if start >= 0:
        spans.append((start * SEG_WINDOW, (end + 1) * SEG_WINDOW))
    return spans


def _dominant_bin(samples, start: int, n: int, table: CodecTable) -> int:
    coeffs = _goertzel_coeffs(table.bins, SAMPLE_RATE)
    powers = array("d", bytes(8 * len(coeffs)))
    _kernels.goertzel_powers_into(samples, start, n, coeffs, powers)
    best = 0
    for b in range(1, len(powers)):
        if powers[b] > powers[best]:
            best = b
    return best


def decode_phrase(clip: AudioClip, table: CodecTable, vocabulary) -> str:
    """Recognize a clip against a vocabulary. Silence-segmented words must
    each resolve to exactly three tones whose bin triple names a unique
    vocabulary word; anything else rejects the whole utterance."""
    by_triple: dict[tuple[int, int, int], list[str]] = {}
    for word in vocabulary:
        by_triple.setdefault(word_triple(word), []).append(word)

    samples = clip.samples
    spans = _active_spans(samples)
    if not spans:
        raise NoUtterance("no audio above the segmentation threshold")

    words: list[str] = []
    for start, end in spans:
        span_len = end - start
        tone_count = int(math.floor(span_len / TONE_SAMPLES + 0.5))
        if tone_count != 3:
            raise UnknownWord(f"segment of {span_len} samples is not a "
                              f"three-tone word")
        triple = []
        for t in range(3):
            base = start + t * TONE_SAMPLES
            n = min(TONE_SAMPLES, len(samples) - base)
            if n < TONE_SAMPLES // 2:
                raise UnknownWord("truncated tone segment")
            triple.append(_dominant_bin(samples, base, n, table))
        matches = by_triple.get(tuple(triple), [])
        if not matches:
            raise UnknownWord(f"no vocabulary word has tone triple {tuple(triple)}")
        if len(matches) > 1:
            raise AmbiguousWord(f"tone triple {tuple(triple)} is shared by "
                                f"{sorted(matches)}")
        words.append(matches[0])
    return " ".join(words)
