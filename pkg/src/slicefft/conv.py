"""Streaming linear-convolution engine.

Input and kernel samples are queued in two FIFOs. Each clock cycle the kernel
is placed over one input sample ``x[j]``; the ``m`` products ``h[k] * x[j]``
come out of the bit slicing multiplier together and a 1x32 demux steers each
into accumulator ``j + k`` of a 32-entry, 32-bit register file. Accumulator
``t`` has seen its last contribution once ``j >= min(t, n - 1)``. Finished
outputs leave one per cycle in ascending ``t`` with ``rcv`` raised.

Register-file adders wrap at 32 bits and latch a sticky overflow flag.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

from .bsm import LutBank, bsm_mul_signed, default_bank
from .errors import RangeError, SizeError
from .fixedpoint import FixedWord, Format, wrap_raw

MAX_LEN = 15
REGFILE_SIZE = 32
ACC_BITS = 32
SAMPLE_FMT = Format(16, 0)


@dataclass(frozen=True)
class ConvConfig:
    n: int
    m: int
    sample_fmt: Format = SAMPLE_FMT
    acc_bits: int = ACC_BITS

    def __post_init__(self):
        for name, v in (("n", self.n), ("m", self.m)):
            if not 1 <= v <= MAX_LEN:
                raise SizeError(f"{name}={v} outside 1..{MAX_LEN}")

    @property
    def t_len(self) -> int:
        return self.n + self.m - 1


@dataclass
class StepReport:
    cycle: int
    products_routed: list[tuple[int, int]]
    rcv: bool
    emitted: tuple[int, int] | None
    terminal: bool = False


@dataclass
class ConvResult:
    y: list[int]
    overflow_any: bool
    cycles_used: int
    trace: list[StepReport] = field(default_factory=list, repr=False)


def _as_words(seq: Sequence, fmt: Format) -> list[FixedWord]:
    out = []
    for v in seq:
        if isinstance(v, FixedWord):
            if v.fmt != fmt:
                raise RangeError(f"sample format {v.fmt} is not {fmt}")
            out.append(v)
        else:
            if not fmt.contains(int(v)):
                raise RangeError(f"sample {v} does not fit {fmt}")
            out.append(FixedWord(int(v), fmt))
    return out


class ConvEngine:
    def __init__(self, bank: LutBank | None = None, sample_fmt: Format = SAMPLE_FMT):
        self.bank = bank or default_bank()
        self.sample_fmt = sample_fmt
        self.config: ConvConfig | None = None
        self.input_fifo: deque[FixedWord] = deque()
        self.kernel_fifo: deque[FixedWord] = deque()
        self.regfile = [0] * REGFILE_SIZE
        self.overflow = [False] * REGFILE_SIZE
        self.demux_select = 0
        self.rcv = False
        self.cycle = 0
        self._kernel: list[FixedWord] = []
        self._next_emit = 0

    def load(self, x: Sequence, h: Sequence) -> None:
        self.config = ConvConfig(len(x), len(h), self.sample_fmt)
        self.input_fifo = deque(_as_words(x, self.sample_fmt))
        self.kernel_fifo = deque(_as_words(h, self.sample_fmt))
        self._kernel = list(self.kernel_fifo)
        self.regfile = [0] * REGFILE_SIZE
        self.overflow = [False] * REGFILE_SIZE
        self.demux_select = 0
        self.rcv = False
        self.cycle = 0
        self._next_emit = 0

    @property
    def finished(self) -> bool:
        return self.config is None or self._next_emit >= self.config.t_len

    def _ready(self, t: int) -> bool:
        # accumulator t is final once input min(t, n-1) has been consumed
        consumed = self.config.n - len(self.input_fifo)
        return consumed > min(t, self.config.n - 1)

    def step(self) -> StepReport:
        if self.finished:
            return StepReport(self.cycle, [], False, None, terminal=True)
        routed = []
        if self.input_fifo:
            j = self.config.n - len(self.input_fifo)
            xj = self.input_fifo.popleft()
            for k, hk in enumerate(self._kernel):
                prod = bsm_mul_signed(hk, xj, self.bank).raw
                idx = j + k
                self.demux_select = idx
                total = self.regfile[idx] + prod
                wrapped = wrap_raw(total, ACC_BITS)
                if wrapped != total:
                    self.overflow[idx] = True
                self.regfile[idx] = wrapped
                routed.append((idx, prod))
        emitted = None
        self.rcv = False
        if self._ready(self._next_emit):
            t = self._next_emit
            emitted = (t, self.regfile[t])
            self.rcv = True
            self._next_emit += 1
        report = StepReport(self.cycle, routed, self.rcv, emitted)
        self.cycle += 1
        return report


def run(x: Sequence, h: Sequence, bank: LutBank | None = None, keep_trace: bool = False) -> ConvResult:
    engine = ConvEngine(bank)
    engine.load(x, h)
    y: list[int] = []
    trace = []
    while not engine.finished:
        rep = engine.step()
        if keep_trace:
            trace.append(rep)
        if rep.emitted is not None:
            y.append(rep.emitted[1])
    return ConvResult(y, any(engine.overflow), engine.cycle, trace)
