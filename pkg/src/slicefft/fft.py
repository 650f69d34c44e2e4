"""Cycle-level radix-2 single-path delay feedback (SDF) DIF FFT.

An N-point pipeline is log2(N) cascaded stages. The stage handling blocks of
``L`` samples owns a feedback FIFO of depth ``D = L/2`` and a ROM of ``D``
twiddles ``W_L^n``. Per block, with ``c`` counting valid inputs:

* ``c < D``  the input is parked in the FIFO; whatever leaves the FIFO head
  is a difference stored during the previous block, which is now multiplied
  by ``W_L^c`` and sent downstream.
* ``c >= D`` the FIFO head ``a`` meets the input ``b``: ``a + b`` goes
  downstream immediately and ``a - b`` goes back into the FIFO.

Stages hand results to the next stage in the same cycle, so the first
output of the last stage appears ``sum(D) = N - 1`` cycles after the first
input. The final stage emits the spectrum in bit-reversed order; the sort
unit writes each value to its bit-reversed slot (N cycles) and then reads
the bank out in natural order, one value per cycle.

Numerics: samples are widened into ``internal_fmt``; sums and products are
exact Python ints until one narrowing per butterfly output. With
``per-stage-half`` scaling every butterfly output is halved before that
narrowing, giving ``DFT / N`` overall. Internal adders wrap; the single
narrowing back to ``sample_fmt`` at the sort output saturates.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Literal, Sequence

import numpy as np

from .bsm import bsm_mul_int
from .errors import FormatMismatchError, ParameterError, RangeError, SizeError
from .fixedpoint import (
    ComplexFixed,
    FixedWord,
    Format,
    Q1_11,
    Q2_22,
    Rounding,
    make_fixed,
    rescale_raw,
    saturate_raw,
    shift_right,
    wrap_raw,
)

Scaling = Literal["per-stage-half", "none-wrap"]
NarrowPoint = Literal["output", "stage"]
Multiplier = Literal["exact", "bsm"]


@dataclass(frozen=True)
class FftConfig:
    n_points: int = 64
    sample_fmt: Format = Q1_11
    twiddle_fmt: Format = Q2_22
    internal_fmt: Format = Q2_22
    scaling: Scaling = "per-stage-half"
    narrowing: Rounding = "truncate"
    # "stage" additionally requantizes every butterfly output onto the
    # sample_fmt grid (kept at internal width) instead of only at the output
    narrow_point: NarrowPoint = "output"
    multiplier: Multiplier = "exact"

    def __post_init__(self):
        n = self.n_points
        if n < 2 or n > 4096 or n & (n - 1):
            raise ParameterError(f"n_points must be a power of two in 2..4096, got {n}")
        if self.scaling not in ("per-stage-half", "none-wrap"):
            raise ParameterError(f"unknown scaling {self.scaling!r}")
        if self.narrowing not in ("truncate", "nearest-even"):
            raise ParameterError(f"unknown narrowing {self.narrowing!r}")
        if self.narrow_point not in ("output", "stage"):
            raise ParameterError(f"unknown narrow_point {self.narrow_point!r}")
        if self.multiplier not in ("exact", "bsm"):
            raise ParameterError(f"unknown multiplier {self.multiplier!r}")

    @property
    def stages(self) -> int:
        return self.n_points.bit_length() - 1

    @property
    def halving(self) -> bool:
        return self.scaling == "per-stage-half"

    @property
    def scale_factor(self) -> float:
        """Ratio between the emitted spectrum and the true DFT."""
        return 1.0 / self.n_points if self.halving else 1.0

    def describe(self) -> str:
        return (
            f"n_points={self.n_points} sample_fmt={self.sample_fmt} twiddle_fmt={self.twiddle_fmt} "
            f"internal_fmt={self.internal_fmt} scaling={self.scaling} narrowing={self.narrowing} "
            f"narrow_point={self.narrow_point} multiplier={self.multiplier}"
        )


def bit_reverse(k: int, bits: int) -> int:
    r = 0
    for _ in range(bits):
        r = (r << 1) | (k & 1)
        k >>= 1
    return r


def bit_reverse_table(n: int) -> list[int]:
    bits = n.bit_length() - 1
    return [bit_reverse(k, bits) for k in range(n)]


# ---------------------------------------------------------------------------
# twiddle ROM
# ---------------------------------------------------------------------------


@dataclass
class TwiddleRom:
    n_stage: int
    entries: list[ComplexFixed]
    counter: int = 0
    valid_in: bool = False
    raw: list[tuple[int, int]] = field(init=False, repr=False)

    def __post_init__(self):
        self.raw = [e.raw for e in self.entries]

    @property
    def fmt(self) -> Format:
        return self.entries[0].fmt

    def __len__(self) -> int:
        return len(self.entries)


def gen_twiddle_rom(n_stage: int, fmt: Format = Q2_22, rounding: Rounding = "nearest-even") -> TwiddleRom:
    """Quantized ``W^k = exp(-2j*pi*k/n_stage)`` for ``k < n_stage/2``."""
    if n_stage < 2 or n_stage & (n_stage - 1):
        raise ParameterError(f"n_stage must be a power of two >= 2, got {n_stage}")
    entries = []
    for k in range(n_stage // 2):
        re, im = _unit_root(k, n_stage)
        entries.append(ComplexFixed(make_fixed(re, fmt, rounding), make_fixed(im, fmt, rounding)))
    return TwiddleRom(n_stage, entries)


def _unit_root(k: int, n: int) -> tuple[float, float]:
    # pin the axis points so they are exact regardless of libm
    eighth = 8 * k
    if eighth % n == 0:
        octant = eighth // n
        exact = {0: (1.0, 0.0), 2: (0.0, -1.0), 4: (-1.0, 0.0), 6: (0.0, 1.0)}
        if octant in exact:
            return exact[octant]
    angle = 2.0 * math.pi * k / n
    return math.cos(angle), -math.sin(angle)


# ---------------------------------------------------------------------------
# butterfly arithmetic on raw counts
# ---------------------------------------------------------------------------


class _Datapath:
    """Per-config raw-count arithmetic used by the pipeline stages."""

    def __init__(self, cfg: FftConfig):
        self.cfg = cfg
        self.bits = cfg.internal_fmt.total_bits
        self.rounding = cfg.narrowing
        self.half = 1 if cfg.halving else 0
        self.mul_shift = cfg.twiddle_fmt.frac_bits + self.half
        drop = cfg.internal_fmt.frac_bits - cfg.sample_fmt.frac_bits
        self.stage_drop = drop if cfg.narrow_point == "stage" and drop > 0 else 0
        self.mul = bsm_mul_int if cfg.multiplier == "bsm" else int.__mul__

    def _finish(self, v: int) -> int:
        v = wrap_raw(v, self.bits)
        if self.stage_drop:
            v = wrap_raw(shift_right(v, self.stage_drop, self.rounding) << self.stage_drop, self.bits)
        return v

    def top(self, ar: int, ai: int, br: int, bi: int) -> tuple[int, int]:
        h, rnd = self.half, self.rounding
        return (
            self._finish(shift_right(ar + br, h, rnd)),
            self._finish(shift_right(ai + bi, h, rnd)),
        )

    def bot(self, dr: int, di: int, wr: int, wi: int) -> tuple[int, int]:
        mul, s, rnd = self.mul, self.mul_shift, self.rounding
        pr = mul(dr, wr) - mul(di, wi)
        pi = mul(dr, wi) + mul(di, wr)
        return self._finish(shift_right(pr, s, rnd)), self._finish(shift_right(pi, s, rnd))

    def widen(self, re: int, im: int) -> tuple[int, int]:
        src, dst = self.cfg.sample_fmt, self.cfg.internal_fmt
        out = []
        for v in (re, im):
            v = rescale_raw(v, src.frac_bits, dst.frac_bits, self.rounding)
            out.append(saturate_raw(v, dst)[0])
        return out[0], out[1]

    def narrow_out(self, re: int, im: int) -> tuple[int, int]:
        src, dst = self.cfg.internal_fmt, self.cfg.sample_fmt
        out = []
        for v in (re, im):
            v = rescale_raw(v, src.frac_bits, dst.frac_bits, self.rounding)
            out.append(saturate_raw(v, dst)[0])
        return out[0], out[1]


def butterfly(a: ComplexFixed, b: ComplexFixed, w: ComplexFixed, cfg: FftConfig) -> tuple[ComplexFixed, ComplexFixed]:
    """One radix-2 DIF butterfly: ``top = a + b``, ``bot = (a - b) * w``."""
    fmt = cfg.internal_fmt
    if a.fmt != fmt or b.fmt != fmt:
        raise FormatMismatchError(f"butterfly inputs must be {fmt}")
    if w.fmt != cfg.twiddle_fmt:
        raise FormatMismatchError(f"twiddle must be {cfg.twiddle_fmt}")
    dp = _Datapath(cfg)
    (ar, ai), (br, bi), (wr, wi) = a.raw, b.raw, w.raw
    top = dp.top(ar, ai, br, bi)
    bot = dp.bot(ar - br, ai - bi, wr, wi)
    return ComplexFixed.from_raw(*top, fmt), ComplexFixed.from_raw(*bot, fmt)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------

# A datum in flight: (re, im, frame tag); tag None marks flush filler.
_Datum = tuple


class FftStage:
    def __init__(self, n_stage: int, cfg: FftConfig, datapath: _Datapath):
        self.n_stage = n_stage
        self.depth = n_stage // 2
        self.rom = gen_twiddle_rom(n_stage, cfg.twiddle_fmt)
        self.fifo: deque = deque([None] * self.depth, maxlen=self.depth)
        self.phase = "waiting"
        self.out_valid = False
        self._dp = datapath

    @property
    def occupancy(self) -> int:
        return sum(e is not None for e in self.fifo)

    @property
    def counter(self) -> int:
        return self.rom.counter

    def step(self, inp: _Datum | None) -> _Datum | None:
        rom = self.rom
        rom.valid_in = inp is not None
        if inp is None:
            self.phase = "waiting"
            self.out_valid = False
            return None
        c = rom.counter
        head = self.fifo.popleft()
        if c < self.depth:
            self.fifo.append(inp)
            if head is None:
                out = None
                self.phase = "waiting"
            else:
                wr, wi = rom.raw[c]
                out = (*self._dp.bot(head[0], head[1], wr, wi), head[2])
                self.phase = "multiply"
        else:
            ar, ai, tag = head
            br, bi, _ = inp
            self.fifo.append((ar - br, ai - bi, tag))
            out = (*self._dp.top(ar, ai, br, bi), tag)
            self.phase = "sum"
        rom.counter = (c + 1) % self.n_stage
        self.out_valid = out is not None
        return out


class SortBuffer:
    """Bit-reversal reorder: write N values to mirrored slots, then read in order."""

    def __init__(self, n_points: int):
        self.n_points = n_points
        self.write_mux = bit_reverse_table(n_points)
        self.slots: list = [None] * n_points
        self.write_count = 0
        self.tag = None
        self.drained = True

    def write(self, datum: _Datum) -> tuple[object, list] | None:
        """Store one value; returns ``(tag, slots)`` when a block completes."""
        k = self.write_count
        if k == 0:
            self.tag = datum[2]
            self.drained = False
        self.slots[self.write_mux[k]] = datum
        self.write_count = k + 1
        if self.write_count == self.n_points:
            done = (self.tag, self.slots)
            self.slots = [None] * self.n_points
            self.write_count = 0
            self.drained = True
            return done
        return None


def sort_bit_reversed(values: Sequence, n_points: int) -> list:
    buf = SortBuffer(n_points)
    done = None
    for v in values:
        done = buf.write((v, None, None))
    return [d[0] for d in done[1]]


@dataclass
class PipelineReport:
    cycle: int
    stage_outputs_valid: tuple[bool, ...]
    emitted: tuple[int, ComplexFixed] | None = None
    emitted_frame: int | None = None
    sort_write: bool = False

    @property
    def rcv(self) -> bool:
        return self.emitted is not None


@dataclass
class FftFrameResult:
    spectrum: list[ComplexFixed]
    latency_cycles: int
    sort_cycles: int
    scale_factor: float
    reports: list[PipelineReport] = field(default_factory=list, repr=False)


@dataclass
class _FrameTiming:
    first_input: int | None = None
    first_final_output: int | None = None
    first_sort_write: int | None = None
    last_sort_write: int | None = None


class FftPipeline:
    def __init__(self, cfg: FftConfig | None = None):
        self.cfg = cfg or FftConfig()
        self._dp = _Datapath(self.cfg)
        n = self.cfg.n_points
        self.stages = [FftStage(n >> s, self.cfg, self._dp) for s in range(self.cfg.stages)]
        self.sort = SortBuffer(n)
        self.cycle = 0
        self._inputs = 0
        self._ready: deque = deque()
        self._emitting: tuple[object, list, int] | None = None
        self.timing: dict[int, _FrameTiming] = {}
        self.spectra: dict[int, list[ComplexFixed]] = {}

    def _frame_of_input(self) -> int:
        return self._inputs // self.cfg.n_points

    def _emit(self) -> tuple[int | None, tuple[int, ComplexFixed] | None]:
        if self._emitting is None and self._ready:
            tag, slots = self._ready.popleft()
            self._emitting = (tag, slots, 0)
            self.spectra[tag] = []
        if self._emitting is None:
            return None, None
        tag, slots, k = self._emitting
        re, im, _ = slots[k]
        value = ComplexFixed.from_raw(*self._dp.narrow_out(re, im), self.cfg.sample_fmt)
        self.spectra[tag].append(value)
        k += 1
        self._emitting = None if k == len(slots) else (tag, slots, k)
        return tag, (k - 1, value)

    def _clock(self, datum: _Datum | None) -> PipelineReport:
        cyc = self.cycle
        tag, emitted = self._emit()
        valids = []
        for stage in self.stages:
            datum = stage.step(datum)
            valids.append(datum is not None)
        wrote = False
        if datum is not None:
            wrote = True
            ftag = datum[2]
            if ftag is not None:
                t = self.timing[ftag]
                if t.first_final_output is None:
                    t.first_final_output = cyc
                    t.first_sort_write = cyc
                t.last_sort_write = cyc
            done = self.sort.write(datum)
            if done is not None and done[0] is not None:
                self._ready.append(done)
        self.cycle += 1
        return PipelineReport(cyc, tuple(valids), emitted, tag, wrote)

    def push_sample(self, x: ComplexFixed | None, valid: bool = True) -> PipelineReport:
        """Advance one clock. ``valid=False`` is an idle cycle: stages hold state."""
        if not valid or x is None:
            return self._clock(None)
        if x.fmt != self.cfg.sample_fmt:
            raise FormatMismatchError(f"sample is {x.fmt}, pipeline expects {self.cfg.sample_fmt}")
        tag = self._frame_of_input()
        if tag not in self.timing:
            self.timing[tag] = _FrameTiming(first_input=self.cycle)
        self._inputs += 1
        return self._clock((*self._dp.widen(*x.raw), tag))

    def flush(self) -> list[PipelineReport]:
        """Zero-pad any partial frame, then clock one frame of filler through."""
        n = self.cfg.n_points
        reports = []
        while self._inputs % n:
            reports.append(self.push_sample(ComplexFixed.from_raw(0, 0, self.cfg.sample_fmt)))
        for _ in range(n):
            reports.append(self._clock((0, 0, None)))
        return reports

    def idle_until_drained(self) -> list[PipelineReport]:
        reports = []
        while self._emitting is not None or self._ready:
            reports.append(self._clock(None))
        return reports

    def run_frame(self, frame: Sequence[ComplexFixed], keep_reports: bool = False) -> FftFrameResult:
        n = self.cfg.n_points
        if len(frame) != n:
            raise SizeError(f"frame has {len(frame)} samples, pipeline is {n}-point")
        if self._inputs % n:
            raise SizeError("pipeline holds a partial frame")
        tag = self._frame_of_input()
        reports = [self.push_sample(x) for x in frame]
        reports += self.flush()
        reports += self.idle_until_drained()
        t = self.timing[tag]
        return FftFrameResult(
            spectrum=self.spectra.pop(tag),
            latency_cycles=t.first_final_output - t.first_input,
            sort_cycles=t.last_sort_write - t.first_sort_write + 1,
            scale_factor=self.cfg.scale_factor,
            reports=reports if keep_reports else [],
        )


def run_frame(frame: Sequence[ComplexFixed], cfg: FftConfig | None = None, keep_reports: bool = False) -> FftFrameResult:
    return FftPipeline(cfg).run_frame(frame, keep_reports)


# ---------------------------------------------------------------------------
# batch streaming
# ---------------------------------------------------------------------------


def fast_path_ok(cfg: FftConfig) -> bool:
    """Whether the compiled kernel can hold every intermediate in int64."""
    widest_product = cfg.internal_fmt.total_bits + 1 + cfg.twiddle_fmt.total_bits
    return cfg.multiplier == "exact" and widest_product + 1 <= 63 and cfg.sample_fmt.total_bits <= 62


def frames_to_raw(frames: Iterable[Sequence[ComplexFixed]]) -> tuple[np.ndarray, np.ndarray]:
    re = np.array([[x.re.raw for x in f] for f in frames], dtype=np.int64)
    im = np.array([[x.im.raw for x in f] for f in frames], dtype=np.int64)
    return re, im


def run_frames_raw(re: np.ndarray, im: np.ndarray, cfg: FftConfig | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Stream ``F`` frames back to back (no gaps) and return natural-order spectra.

    Inputs and outputs are raw counts in ``sample_fmt``, shape ``(F, N)``.
    Uses the compiled cycle-level kernel when the config fits int64,
    otherwise the object model above.
    """
    cfg = cfg or FftConfig()
    re = np.atleast_2d(np.asarray(re, dtype=np.int64))
    im = np.atleast_2d(np.asarray(im, dtype=np.int64))
    if re.shape != im.shape or re.shape[1] != cfg.n_points:
        raise SizeError(f"frames must have shape (F, {cfg.n_points}), got {re.shape} / {im.shape}")
    for arr in (re, im):
        if arr.size and (arr.min() < cfg.sample_fmt.min_raw or arr.max() > cfg.sample_fmt.max_raw):
            raise RangeError(f"frame samples do not fit {cfg.sample_fmt}")
    if fast_path_ok(cfg):
        from ._kernels import sdf_stream

        return sdf_stream(re, im, cfg)
    pipe = FftPipeline(cfg)
    fmt = cfg.sample_fmt
    for f in range(re.shape[0]):
        for n in range(cfg.n_points):
            pipe.push_sample(ComplexFixed.from_raw(int(re[f, n]), int(im[f, n]), fmt))
    pipe.flush()
    pipe.idle_until_drained()
    out_re = np.empty_like(re)
    out_im = np.empty_like(im)
    for f in range(re.shape[0]):
        spec = pipe.spectra.pop(f)
        out_re[f] = [x.re.raw for x in spec]
        out_im[f] = [x.im.raw for x in spec]
    return out_re, out_im


def quantize_frame(values: Sequence[complex], fmt: Format = Q1_11, rounding: Rounding = "nearest-even") -> list[ComplexFixed]:
    return [ComplexFixed.from_complex(v, fmt, rounding) for v in values]


def with_internal(cfg: FftConfig, fmt: Format) -> FftConfig:
    return replace(cfg, internal_fmt=fmt)
