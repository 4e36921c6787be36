"""DSP kernels: compiled extension when available, pure Python otherwise.

The two backends are interchangeable and bit-identical. Selection happens
once at import; set VOICEBOT_KERNELS=pure or =cython to force a backend
(cython raises if the extension is missing). ``benchmarks/bench_kernels.py``
compares the two.
"""

import os

from voicebot._kernels import pure as _pure

_forced = os.environ.get("VOICEBOT_KERNELS", "").strip().lower()

if _forced == "pure":
    _impl = _pure
else:
    try:
        from voicebot._kernels import _fast as _impl  # type: ignore
    except ImportError:
        if _forced == "cython":
            raise
        _impl = _pure

BACKEND = "pure" if _impl is _pure else "cython"

rms_frame = _impl.rms_frame
sum_squares = _impl.sum_squares
synth_tone_into = _impl.synth_tone_into
goertzel_powers_into = _impl.goertzel_powers_into
scale_saturate_into = _impl.scale_saturate_into
window_activity = _impl.window_activity
