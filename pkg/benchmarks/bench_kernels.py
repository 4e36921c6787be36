#!/usr/bin/env python3
"""Benchmark the compiled DSP kernels against the pure-Python reference.

Times the primitive kernels on both backends, then the end-to-end phrase
codec (the hot path: Goertzel over 32 bins per 50 ms tone). Run:

    python benchmarks/bench_kernels.py
"""

import math
import random
import time
from array import array

from voicebot._kernels import pure

try:
    from voicebot._kernels import _fast as fast
except ImportError:
    fast = None

from voicebot import _kernels
from voicebot.audio import DEFAULT_TABLE, decode_phrase, encode_phrase


def timeit(fn, reps):
    best = math.inf
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(reps):
            fn()
        best = min(best, (time.perf_counter() - t0) / reps)
    return best


def bench_primitives():
    rnd = random.Random(0)
    frame = array("h", (rnd.randint(-16000, 16000) for _ in range(256)))
    tone = array("h", bytes(2 * 400))
    pure.synth_tone_into(tone, 0, 1200.0, 400, 16000, 8000)
    coeffs = array("d", (2.0 * math.cos(2.0 * math.pi * f / 8000)
                         for f in DEFAULT_TABLE.bins))
    powers = array("d", bytes(8 * 32))
    scaled = array("h", bytes(2 * 400))

    cases = [
        ("rms_frame (256 samples)", 2000,
         lambda impl: impl.rms_frame(frame)),
        ("synth_tone (400 samples)", 2000,
         lambda impl: impl.synth_tone_into(tone, 0, 1200.0, 400, 16000, 8000)),
        ("goertzel 32 bins x 400", 200,
         lambda impl: impl.goertzel_powers_into(tone, 0, 400, coeffs, powers)),
        ("scale_saturate (400)", 2000,
         lambda impl: impl.scale_saturate_into(tone, scaled, 73, 100)),
        ("window_activity (400/50)", 2000,
         lambda impl: impl.window_activity(tone, 50, 2 * 10 ** 8)),
    ]

    print(f"{'kernel':<28} {'pure':>12} {'cython':>12} {'speedup':>9}")
    for name, reps, call in cases:
        t_pure = timeit(lambda: call(pure), reps)
        if fast is None:
            print(f"{name:<28} {t_pure * 1e6:>10.1f}us {'n/a':>12} {'-':>9}")
            continue
        t_fast = timeit(lambda: call(fast), reps)
        print(f"{name:<28} {t_pure * 1e6:>10.1f}us {t_fast * 1e6:>10.1f}us "
              f"{t_pure / t_fast:>8.1f}x")


def bench_codec():
    sentence = "move forward and grab the object"
    vocab = set(sentence.split())
    clip = encode_phrase(sentence)
    print(f"\ncodec on selected backend ({_kernels.BACKEND}):")
    t_enc = timeit(lambda: encode_phrase(sentence), 50)
    t_dec = timeit(lambda: decode_phrase(clip, DEFAULT_TABLE, vocab), 20)
    print(f"  encode_phrase: {t_enc * 1e3:.3f} ms")
    print(f"  decode_phrase: {t_dec * 1e3:.3f} ms "
          f"({len(clip) / 8000 / t_dec:.0f}x real time)")


if __name__ == "__main__":
    print(f"selected backend: {_kernels.BACKEND}")
    bench_primitives()
    bench_codec()
