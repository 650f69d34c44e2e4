"""Reference models the hardware blocks are checked against.

``direct_conv``, ``dft_naive`` and ``fft_dif_float`` share no code with the
datapath modules. ``fixed_dif`` is the behavioral twin of the SDF pipeline:
it uses the same fixedpoint primitives (so "same quantization" holds by
definition) but organizes the work as the textbook in-place loop nest.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import SizeError
from .fixedpoint import (
    ComplexFixed,
    FixedWord,
    Format,
    apply_overflow,
    rescale_raw,
    shift_right,
)


def direct_conv(x: Sequence[int], h: Sequence[int]) -> list[int]:
    """Full linear convolution in unbounded integers."""
    if not x or not h:
        return []
    y = [0] * (len(x) + len(h) - 1)
    for t in range(len(y)):
        acc = 0
        for m in range(len(h)):
            if 0 <= t - m < len(x):
                acc += int(h[m]) * int(x[t - m])
        y[t] = acc
    return y


def dft_naive(frame) -> np.ndarray:
    """O(N^2) DFT, one output bin at a time.

    Accepts a 1-D frame or a 2-D stack of frames (one per row). The phase
    index ``n*k`` is reduced mod N before scaling so large N keeps full
    double precision.
    """
    x = np.asarray(frame, dtype=np.complex128)
    n = x.shape[-1]
    idx = np.arange(n)
    out = np.empty_like(x)
    for k in range(n):
        phase = (idx * k) % n
        w = np.exp(-2j * np.pi * phase / n)
        out[..., k] = x @ w
    return out


def _dif_bitrev(x: np.ndarray) -> np.ndarray:
    n = x.shape[-1]
    if n == 1:
        return x
    half = n // 2
    a, b = x[..., :half], x[..., half:]
    w = np.exp(-2j * np.pi * np.arange(half) / n)
    even = _dif_bitrev(a + b)
    odd = _dif_bitrev((a - b) * w)
    return np.concatenate([even, odd], axis=-1)


def bitrev_indices(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def fft_dif_float(frame) -> np.ndarray:
    """Recursive even/odd DIF split followed by the bit-reversal reorder.

    The recursion concatenates the even-bin half ahead of the odd-bin half,
    which leaves the spectrum in bit-reversed order until the final gather.
    """
    x = np.asarray(frame, dtype=np.complex128)
    n = x.shape[-1]
    if n < 1 or n & (n - 1):
        raise SizeError(f"length {n} is not a power of two")
    scrambled = _dif_bitrev(x)
    # scrambled[j] holds X[bitrev(j)]; bit reversal is its own inverse
    return scrambled[..., bitrev_indices(n)]


def fixed_dif(frame: Sequence[ComplexFixed], cfg) -> list[ComplexFixed]:
    """In-place fixed-point DIF with the pipeline's exact quantization steps."""
    from .fft import gen_twiddle_rom

    n = cfg.n_points
    if len(frame) != n:
        raise SizeError(f"frame has {len(frame)} samples, config is {n}-point")
    s_fmt: Format = cfg.sample_fmt
    i_fmt: Format = cfg.internal_fmt
    rnd = cfg.narrowing
    half = 1 if cfg.scaling == "per-stage-half" else 0
    tw_shift = cfg.twiddle_fmt.frac_bits + half
    drop = i_fmt.frac_bits - s_fmt.frac_bits
    per_stage = cfg.narrow_point == "stage" and drop > 0
    if cfg.multiplier == "bsm":
        from .bsm import bsm_mul_int as mul
    else:
        def mul(a, b):
            return a * b

    def fit(v):
        v = apply_overflow(v, i_fmt, "wrap")[0]
        if per_stage:
            v = apply_overflow(shift_right(v, drop, rnd) << drop, i_fmt, "wrap")[0]
        return v

    re = []
    im = []
    for x in frame:
        for dst, word in ((re, x.re), (im, x.im)):
            v = rescale_raw(word.raw, s_fmt.frac_bits, i_fmt.frac_bits, rnd)
            dst.append(apply_overflow(v, i_fmt, "saturate")[0])

    span = n
    while span >= 2:
        d = span // 2
        rom = gen_twiddle_rom(span, cfg.twiddle_fmt).raw
        for base in range(0, n, span):
            for j in range(d):
                p, q = base + j, base + j + d
                ar, ai, br, bi = re[p], im[p], re[q], im[q]
                dr, di = ar - br, ai - bi
                wr, wi = rom[j]
                re[p] = fit(shift_right(ar + br, half, rnd))
                im[p] = fit(shift_right(ai + bi, half, rnd))
                re[q] = fit(shift_right(mul(dr, wr) - mul(di, wi), tw_shift, rnd))
                im[q] = fit(shift_right(mul(dr, wi) + mul(di, wr), tw_shift, rnd))
        span = d

    order = bitrev_indices(n)
    out = []
    for k in range(n):
        j = int(order[k])
        vr = apply_overflow(rescale_raw(re[j], i_fmt.frac_bits, s_fmt.frac_bits, rnd), s_fmt, "saturate")[0]
        vi = apply_overflow(rescale_raw(im[j], i_fmt.frac_bits, s_fmt.frac_bits, rnd), s_fmt, "saturate")[0]
        out.append(ComplexFixed(FixedWord(vr, s_fmt), FixedWord(vi, s_fmt)))
    return out
