# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled DSP kernels; must stay bit-identical to voicebot._kernels.pure.

Rounding is floor(x + 0.5) (half toward +infinity); integer scaling uses
explicit floor division because C division truncates toward zero.
"""

from libc.math cimport floor, sin, sqrt


def rms_frame(const short[:] samples):
    cdef Py_ssize_t i, n = samples.shape[0]
    cdef long long total = 0
    cdef long long s
    for i in range(n):
        s = samples[i]
        total += s * s
    return <long long>floor(sqrt(<double>total / n) + 0.5)


def sum_squares(const short[:] samples, Py_ssize_t start, Py_ssize_t n):
    cdef Py_ssize_t i
    cdef long long total = 0
    cdef long long s
    for i in range(start, start + n):
        s = samples[i]
        total += s * s
    return total


def synth_tone_into(short[:] out, Py_ssize_t start, double freq, Py_ssize_t n,
                    int amplitude, int rate):
    cdef double w = 2.0 * 3.141592653589793 * freq / rate
    cdef Py_ssize_t k
    for k in range(n):
        out[start + k] = <short>(<long long>floor(amplitude * sin(w * k) + 0.5))


def goertzel_powers_into(const short[:] samples, Py_ssize_t start, Py_ssize_t n,
                         const double[:] coeffs, double[:] out):
    cdef Py_ssize_t b, i, nbins = coeffs.shape[0]
    cdef double c, s0, s1, s2
    for b in range(nbins):
        c = coeffs[b]
        s1 = 0.0
        s2 = 0.0
        for i in range(start, start + n):
            s0 = samples[i] + c * s1 - s2
            s2 = s1
            s1 = s0
        out[b] = s1 * s1 + s2 * s2 - c * s1 * s2


def scale_saturate_into(const short[:] src, short[:] dst, int num, int den):
    cdef Py_ssize_t i, n = src.shape[0]
    cdef long long v, d2 = 2 * den
    for i in range(n):
        # cdivision is on, so emulate Python floor division by hand
        v = 2 * <long long>src[i] * num + den
        if v >= 0:
            v = v // d2
        else:
            v = -((-v + d2 - 1) // d2)
        if v > 32767:
            v = 32767
        elif v < -32768:
            v = -32768
        dst[i] = <short>v


def window_activity(const short[:] samples, Py_ssize_t win, long long thresh_sumsq):
    cdef Py_ssize_t nwin = samples.shape[0] // win
    if nwin == 0:
        return b""
    cdef bytearray out = bytearray(nwin)
    cdef unsigned char[:] view = out
    cdef Py_ssize_t w, i, base
    cdef long long total, s
    for w in range(nwin):
        total = 0
        base = w * win
        for i in range(base, base + win):
            s = samples[i]
            total += s * s
        view[w] = 1 if total >= thresh_sumsq else 0
    return bytes(out)
