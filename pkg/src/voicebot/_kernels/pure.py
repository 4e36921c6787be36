"""Pure-Python reference implementations of the DSP kernels.

The compiled extension (``voicebot._kernels._fast``) mirrors these bit for
bit; tests assert equality on randomized inputs. Keep the arithmetic order
identical in both implementations: rounding is floor(x + 0.5) everywhere
(half toward +infinity), and integer scaling uses exact floor division.
"""

import math


def rms_frame(samples):
    """Integer RMS of a block of 16-bit samples, rounded half-up."""
    total = 0
    for s in samples:
        total += s * s
    return int(math.floor(math.sqrt(total / len(samples)) + 0.5))


def sum_squares(samples, start, n):
    total = 0
    for i in range(start, start + n):
        s = samples[i]
        total += s * s
    return total


def synth_tone_into(out, start, freq, n, amplitude, rate):
    """Write one sine tone: out[start+k] = round_half_up(A * sin(2*pi*f*k/rate))."""
    w = 2.0 * math.pi * freq / rate
    for k in range(n):
        out[start + k] = int(math.floor(amplitude * math.sin(w * k) + 0.5))


def goertzel_powers_into(samples, start, n, coeffs, out):
    """Goertzel squared magnitude of samples[start:start+n] at each tone.

    coeffs[b] = 2*cos(2*pi*f_b/rate); out receives one power per tone.
    """
    for b in range(len(coeffs)):
        c = coeffs[b]
        s1 = 0.0
        s2 = 0.0
        for i in range(start, start + n):
            s0 = samples[i] + c * s1 - s2
            s2 = s1
            s1 = s0
        out[b] = s1 * s1 + s2 * s2 - c * s1 * s2


def scale_saturate_into(src, dst, num, den):
    """dst[i] = clamp(round_half_up(src[i]*num/den), -32768, 32767), exactly."""
    d2 = 2 * den
    for i in range(len(src)):
        v = (2 * src[i] * num + den) // d2
        if v > 32767:
            v = 32767
        elif v < -32768:
            v = -32768
        dst[i] = v


def window_activity(samples, win, thresh_sumsq):
    """One byte per full window of ``win`` samples: 1 where the window's
    sum of squares reaches ``thresh_sumsq``. Trailing partial window ignored."""
    nwin = len(samples) // win
    out = bytearray(nwin)
    for w in range(nwin):
        total = 0
        base = w * win
        for i in range(base, base + win):
            s = samples[i]
            total += s * s
        out[w] = 1 if total >= thresh_sumsq else 0
    return bytes(out)
