"""Compiled twin of ``FftPipeline`` for long back-to-back streams.

Same stage schedule, FIFO discipline and rounding as the object model in
``fft.py``, on int64 ring buffers. Only used when ``fft.fast_path_ok`` says
every intermediate fits in 63 bits; the test suite checks both paths agree
bit for bit.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .fft import FftConfig, bit_reverse_table, gen_twiddle_rom


@njit(cache=True, inline="always")
def _shr(v, s, nearest):
    if s <= 0:
        return v << -s
    q = v >> s
    if not nearest:
        return q
    r = v - (q << s)
    half = np.int64(1) << (s - 1)
    if r > half or (r == half and (q & 1) == 1):
        q += 1
    return q


@njit(cache=True, inline="always")
def _wrap(v, bits):
    span = np.int64(1) << bits
    h = span >> 1
    return ((v + h) & (span - 1)) - h


@njit(cache=True, inline="always")
def _finish(v, bits, drop, nearest):
    v = _wrap(v, bits)
    if drop > 0:
        v = _wrap(_shr(v, drop, nearest) << drop, bits)
    return v


@njit(cache=True, inline="always")
def _clamp(v, lo, hi):
    if v > hi:
        return hi
    if v < lo:
        return lo
    return v


@njit(cache=True)
def _stream(in_re, in_im, depths, offsets, tw_re, tw_im, bitrev,
            bits, half, mul_shift, nearest, drop,
            widen_shift, int_lo, int_hi, out_shift, s_lo, s_hi):
    F, N = in_re.shape
    n_st = depths.shape[0]
    size = offsets[n_st - 1] + depths[n_st - 1]
    f_re = np.zeros(size, np.int64)
    f_im = np.zeros(size, np.int64)
    f_ok = np.zeros(size, np.bool_)
    ptr = np.zeros(n_st, np.int64)
    cnt = np.zeros(n_st, np.int64)
    out_re = np.zeros((F, N), np.int64)
    out_im = np.zeros((F, N), np.int64)
    n_out = 0
    total = F * N + N
    for t in range(total):
        if t < F * N:
            f = t // N
            k = t - f * N
            xr = _clamp(_shr(in_re[f, k], -widen_shift, nearest), int_lo, int_hi)
            xi = _clamp(_shr(in_im[f, k], -widen_shift, nearest), int_lo, int_hi)
        else:
            xr = np.int64(0)
            xi = np.int64(0)
        ok = True
        for s in range(n_st):
            D = depths[s]
            c = cnt[s]
            slot = offsets[s] + ptr[s]
            hr = f_re[slot]
            hi = f_im[slot]
            h_ok = f_ok[slot]
            if c < D:
                f_re[slot] = xr
                f_im[slot] = xi
                f_ok[slot] = True
                if h_ok:
                    wr = tw_re[offsets[s] + c]
                    wi = tw_im[offsets[s] + c]
                    pr = hr * wr - hi * wi
                    pi = hr * wi + hi * wr
                    xr = _finish(_shr(pr, mul_shift, nearest), bits, drop, nearest)
                    xi = _finish(_shr(pi, mul_shift, nearest), bits, drop, nearest)
                else:
                    ok = False
            else:
                f_re[slot] = hr - xr
                f_im[slot] = hi - xi
                f_ok[slot] = True
                sr = _finish(_shr(hr + xr, half, nearest), bits, drop, nearest)
                si = _finish(_shr(hi + xi, half, nearest), bits, drop, nearest)
                xr = sr
                xi = si
            ptr[s] = (ptr[s] + 1) % D
            cnt[s] = (c + 1) % (2 * D)
            if not ok:
                break
        if ok:
            g = n_out // N
            if g < F:
                j = bitrev[n_out - g * N]
                out_re[g, j] = _clamp(_shr(xr, out_shift, nearest), s_lo, s_hi)
                out_im[g, j] = _clamp(_shr(xi, out_shift, nearest), s_lo, s_hi)
            n_out += 1
    return out_re, out_im


_ROM_CACHE: dict = {}


def _roms(cfg: FftConfig):
    key = (cfg.n_points, cfg.twiddle_fmt)
    if key not in _ROM_CACHE:
        depths, offsets, tre, tim = [], [], [], []
        off = 0
        n_stage = cfg.n_points
        while n_stage >= 2:
            rom = gen_twiddle_rom(n_stage, cfg.twiddle_fmt)
            depths.append(n_stage // 2)
            offsets.append(off)
            off += n_stage // 2
            tre.extend(r for r, _ in rom.raw)
            tim.extend(i for _, i in rom.raw)
            n_stage //= 2
        _ROM_CACHE[key] = (
            np.array(depths, np.int64),
            np.array(offsets, np.int64),
            np.array(tre, np.int64),
            np.array(tim, np.int64),
            np.array(bit_reverse_table(cfg.n_points), np.int64),
        )
    return _ROM_CACHE[key]


def sdf_stream(re: np.ndarray, im: np.ndarray, cfg: FftConfig) -> tuple[np.ndarray, np.ndarray]:
    depths, offsets, tre, tim, bitrev = _roms(cfg)
    half = 1 if cfg.halving else 0
    shift = cfg.internal_fmt.frac_bits - cfg.sample_fmt.frac_bits
    drop = shift if cfg.narrow_point == "stage" and shift > 0 else 0
    return _stream(
        np.ascontiguousarray(re, np.int64), np.ascontiguousarray(im, np.int64),
        depths, offsets, tre, tim, bitrev,
        cfg.internal_fmt.total_bits, half, cfg.twiddle_fmt.frac_bits + half,
        cfg.narrowing == "nearest-even", drop,
        shift, cfg.internal_fmt.min_raw, cfg.internal_fmt.max_raw,
        shift, cfg.sample_fmt.min_raw, cfg.sample_fmt.max_raw,
    )
