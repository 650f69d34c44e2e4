"""Signed two's-complement fixed-point words of arbitrary width.

Convention (Q notation, sign bit counted in the integer part):

    Q{total - frac}.{frac}  e.g. Format(12, 11) is Q1.11, Format(24, 22) is Q2.22

A word stores only its integer ``raw`` count; the real value is
``raw / 2**frac_bits``. All arithmetic is done on Python ints so that every
intermediate is exact until a rounding or overflow policy is applied.

The raw-level helpers (``shift_right``, ``wrap_raw``, ``saturate_raw``,
``rescale_raw``) are what the datapath models call in their inner loops; the
word-level functions wrap them for callers that want checked values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational, Real
from typing import Literal

from .errors import FormatMismatchError, ParameterError

Rounding = Literal["truncate", "nearest-even"]
Overflow = Literal["saturate", "wrap"]

ROUNDING_MODES = ("truncate", "nearest-even")
OVERFLOW_MODES = ("saturate", "wrap")

# 48-bit words are the widest datapath format; products of two such words
# still need a container, hence the doubled ceiling.
MAX_TOTAL_BITS = 96


@dataclass(frozen=True)
class Format:
    total_bits: int
    frac_bits: int

    def __post_init__(self):
        if not 2 <= self.total_bits <= MAX_TOTAL_BITS:
            raise ParameterError(f"total_bits must be in 2..{MAX_TOTAL_BITS}, got {self.total_bits}")
        if not 0 <= self.frac_bits < self.total_bits:
            raise ParameterError(
                f"frac_bits must be in 0..{self.total_bits - 1}, got {self.frac_bits}"
            )

    @property
    def int_bits(self) -> int:
        """Integer bits including the sign bit."""
        return self.total_bits - self.frac_bits

    @property
    def min_raw(self) -> int:
        return -(1 << (self.total_bits - 1))

    @property
    def max_raw(self) -> int:
        return (1 << (self.total_bits - 1)) - 1

    @property
    def lsb(self) -> float:
        return 2.0**-self.frac_bits

    def contains(self, raw: int) -> bool:
        return self.min_raw <= raw <= self.max_raw

    def __str__(self) -> str:
        return f"Q{self.int_bits}.{self.frac_bits}"


# ---------------------------------------------------------------------------
# raw-count helpers
# ---------------------------------------------------------------------------


def _check_rounding(rounding: str) -> None:
    if rounding not in ROUNDING_MODES:
        raise ParameterError(f"unknown rounding mode {rounding!r}")


def _check_overflow(overflow: str) -> None:
    if overflow not in OVERFLOW_MODES:
        raise ParameterError(f"unknown overflow mode {overflow!r}")


def shift_right(value: int, shift: int, rounding: Rounding = "truncate") -> int:
    """Divide ``value`` by ``2**shift`` and round the quotient.

    ``truncate`` is an arithmetic shift, i.e. floor division (toward minus
    infinity). ``nearest-even`` breaks ties toward the even quotient.
    """
    if shift <= 0:
        return value << -shift
    q = value >> shift
    if rounding == "truncate":
        return q
    r = value - (q << shift)
    half = 1 << (shift - 1)
    if r > half or (r == half and q & 1):
        q += 1
    return q


def wrap_raw(value: int, total_bits: int) -> int:
    """Reduce ``value`` modulo ``2**total_bits`` into the signed range."""
    span = 1 << total_bits
    half = span >> 1
    return ((value + half) & (span - 1)) - half


def saturate_raw(value: int, fmt: Format) -> tuple[int, bool]:
    if value > fmt.max_raw:
        return fmt.max_raw, True
    if value < fmt.min_raw:
        return fmt.min_raw, True
    return value, False


def apply_overflow(value: int, fmt: Format, overflow: Overflow) -> tuple[int, bool]:
    """Fit ``value`` into ``fmt``; the flag reports whether it was out of range."""
    if fmt.contains(value):
        return value, False
    if overflow == "saturate":
        return saturate_raw(value, fmt)
    _check_overflow(overflow)
    return wrap_raw(value, fmt.total_bits), True


def rescale_raw(value: int, old_frac: int, new_frac: int, rounding: Rounding = "truncate") -> int:
    """Move a raw count between fraction-bit positions; widening is exact."""
    return shift_right(value, old_frac - new_frac, rounding)


# ---------------------------------------------------------------------------
# words
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FixedWord:
    raw: int
    fmt: Format
    # set when the constructor that produced this word had to clip
    saturated: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not isinstance(self.raw, int):
            object.__setattr__(self, "raw", int(self.raw))
        if not self.fmt.contains(self.raw):
            raise FormatMismatchError(f"raw {self.raw} does not fit {self.fmt}")

    @property
    def exact(self) -> Fraction:
        return Fraction(self.raw, 1 << self.fmt.frac_bits)

    def __float__(self) -> float:
        return math.ldexp(self.raw, -self.fmt.frac_bits)

    @property
    def value(self) -> float:
        return float(self)


@dataclass(frozen=True)
class ComplexFixed:
    re: FixedWord
    im: FixedWord

    def __post_init__(self):
        if self.re.fmt != self.im.fmt:
            raise FormatMismatchError(f"real part is {self.re.fmt}, imaginary part is {self.im.fmt}")

    @classmethod
    def from_raw(cls, re: int, im: int, fmt: Format) -> "ComplexFixed":
        return cls(FixedWord(re, fmt), FixedWord(im, fmt))

    @classmethod
    def from_complex(cls, value: complex, fmt: Format, rounding: Rounding = "nearest-even") -> "ComplexFixed":
        value = complex(value)
        return cls(make_fixed(value.real, fmt, rounding), make_fixed(value.imag, fmt, rounding))

    @property
    def fmt(self) -> Format:
        return self.re.fmt

    @property
    def raw(self) -> tuple[int, int]:
        return self.re.raw, self.im.raw

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))


def make_fixed(value: Real, fmt: Format, rounding: Rounding = "nearest-even") -> FixedWord:
    """Quantize a real number into ``fmt``, saturating silently.

    Floats are converted exactly before scaling, so the only rounding is the
    one requested.
    """
    _check_rounding(rounding)
    scaled = (value if isinstance(value, Rational) else Fraction(value)) * (1 << fmt.frac_bits)
    scaled = Fraction(scaled)
    raw = math.floor(scaled) if rounding == "truncate" else round(scaled)
    raw, clipped = saturate_raw(raw, fmt)
    return FixedWord(raw, fmt, clipped)


def resize(
    x: FixedWord,
    new_fmt: Format,
    overflow: Overflow = "saturate",
    narrowing: Rounding = "truncate",
) -> FixedWord:
    _check_rounding(narrowing)
    raw = rescale_raw(x.raw, x.fmt.frac_bits, new_fmt.frac_bits, narrowing)
    raw, flag = apply_overflow(raw, new_fmt, overflow)
    return FixedWord(raw, new_fmt, flag)


def _same_fmt(a: FixedWord, b: FixedWord) -> None:
    if a.fmt != b.fmt:
        raise FormatMismatchError(f"operand formats differ: {a.fmt} vs {b.fmt}")


def add(a: FixedWord, b: FixedWord, overflow: Overflow = "saturate") -> FixedWord:
    _same_fmt(a, b)
    raw, flag = apply_overflow(a.raw + b.raw, a.fmt, overflow)
    return FixedWord(raw, a.fmt, flag)


def sub(a: FixedWord, b: FixedWord, overflow: Overflow = "saturate") -> FixedWord:
    _same_fmt(a, b)
    raw, flag = apply_overflow(a.raw - b.raw, a.fmt, overflow)
    return FixedWord(raw, a.fmt, flag)


def product_format(a: Format, b: Format) -> Format:
    return Format(a.total_bits + b.total_bits, a.frac_bits + b.frac_bits)


def mul_full(a: FixedWord, b: FixedWord) -> FixedWord:
    """Exact product at the combined width; never rounds or overflows."""
    return FixedWord(a.raw * b.raw, product_format(a.fmt, b.fmt))


Q1_11 = Format(12, 11)
Q2_22 = Format(24, 22)
