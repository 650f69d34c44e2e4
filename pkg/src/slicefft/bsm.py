"""Bit slicing multiplier.

An unsigned B-bit operand is cut into t slices of p bits (least significant
first). Every slice pair (X_i, Y_k) is multiplied by table lookup, shifted by
p*(i + k) and the t*t partial products are summed. For the 16-bit / 4-bit
case that is sixteen 4x4 tables.

Signed operands go through a sign-magnitude wrapper so the table contents stay
plain unsigned times tables.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ParameterError, RangeError
from .fixedpoint import FixedWord, Format

MAX_SLICE_BITS = 8


@dataclass(frozen=True)
class SliceParams:
    B: int = 16
    p: int = 4

    def __post_init__(self):
        if self.p < 1 or self.B < 1 or self.B % self.p:
            raise ParameterError(f"B={self.B} is not a positive multiple of p={self.p}")

    @property
    def t(self) -> int:
        return self.B // self.p

    @property
    def mask(self) -> int:
        return (1 << self.p) - 1


DEFAULT_PARAMS = SliceParams(16, 4)


@dataclass(frozen=True)
class SliceVector:
    slices: tuple[int, ...]
    params: SliceParams

    def reassemble(self) -> int:
        return sum(s << (self.params.p * k) for k, s in enumerate(self.slices))


def slice_operand(x: int, params: SliceParams = DEFAULT_PARAMS) -> SliceVector:
    if not 0 <= x < (1 << params.B):
        raise RangeError(f"{x} is not an unsigned {params.B}-bit value")
    p, mask = params.p, params.mask
    return SliceVector(tuple((x >> (p * k)) & mask for k in range(params.t)), params)


class LutBank:
    """The t*t slice-product tables, materialized up front and read-only after.

    Each table is a ``(2**p, 2**p)`` integer array indexed ``[a, b]``. In
    hardware every slice pair has its own table so all lookups fire in one
    cycle; here they hold identical contents but are kept distinct so the
    table count is observable.
    """

    def __init__(self, params: SliceParams = DEFAULT_PARAMS):
        if params.p > MAX_SLICE_BITS:
            raise ParameterError(f"slice width p={params.p} exceeds {MAX_SLICE_BITS}")
        self.params = params
        side = np.arange(1 << params.p, dtype=np.int64)
        tables = []
        for _ in range(params.t * params.t):
            table = np.multiply.outer(side, side)
            table.flags.writeable = False
            tables.append(table)
        self.tables: tuple[np.ndarray, ...] = tuple(tables)
        # plain nested lists for the scalar path; numpy indexing is slow per element
        self._rows = tuple(t.tolist() for t in self.tables)

    def __len__(self) -> int:
        return len(self.tables)

    def table(self, i: int, k: int) -> np.ndarray:
        return self.tables[i * self.params.t + k]

    def lookup(self, i: int, k: int, a: int, b: int) -> int:
        return self._rows[i * self.params.t + k][a][b]


def build_lut_bank(params: SliceParams = DEFAULT_PARAMS) -> LutBank:
    return LutBank(params)


@lru_cache(maxsize=None)
def default_bank(params: SliceParams = DEFAULT_PARAMS) -> LutBank:
    return LutBank(params)


@dataclass(frozen=True)
class BsmProduct:
    value: int
    # partials[i][k] = lut(X_i, Y_k) << p*(i+k)
    partials: tuple[tuple[int, ...], ...]

    @property
    def partial_count(self) -> int:
        return sum(len(row) for row in self.partials)


def bsm_mul_unsigned(x: int, y: int, bank: LutBank) -> BsmProduct:
    params = bank.params
    xs = slice_operand(x, params).slices
    ys = slice_operand(y, params).slices
    p = params.p
    partials = tuple(
        tuple(bank.lookup(i, k, xi, yk) << (p * (i + k)) for k, yk in enumerate(ys))
        for i, xi in enumerate(xs)
    )
    return BsmProduct(sum(map(sum, partials)), partials)


def bsm_mul_signed(x: FixedWord, y: FixedWord, bank: LutBank | None = None) -> FixedWord:
    """Signed multiply of two B-bit words through the unsigned slicing core.

    The magnitude of the most negative input is 2**(B-1), which still fits the
    B-bit unsigned core, so every signed pair is handled exactly.
    """
    bank = bank or default_bank()
    B = bank.params.B
    if x.fmt.total_bits != B or y.fmt.total_bits != B:
        raise RangeError(f"operands must be {B}-bit words, got {x.fmt} and {y.fmt}")
    mag = bsm_mul_unsigned(abs(x.raw), abs(y.raw), bank).value
    raw = -mag if (x.raw < 0) != (y.raw < 0) else mag
    return FixedWord(raw, Format(2 * B, x.fmt.frac_bits + y.fmt.frac_bits))


def bsm_mul_int(x: int, y: int, bank: LutBank | None = None) -> int:
    """Multiply arbitrary signed integers by splitting magnitudes into B-bit limbs.

    Each limb pair goes through ``bsm_mul_unsigned``; limb products are
    shifted and summed exactly.
    """
    bank = bank or default_bank()
    B = bank.params.B
    mask = (1 << B) - 1
    ax, ay = abs(x), abs(y)
    xl, yl = [], []
    while ax:
        xl.append(ax & mask)
        ax >>= B
    while ay:
        yl.append(ay & mask)
        ay >>= B
    total = 0
    for i, a in enumerate(xl):
        for k, b in enumerate(yl):
            total += bsm_mul_unsigned(a, b, bank).value << (B * (i + k))
    return -total if (x < 0) != (y < 0) else total


def bsm_mul_unsigned_batch(x: np.ndarray, y: np.ndarray, bank: LutBank) -> np.ndarray:
    """Vectorized ``bsm_mul_unsigned(...).value`` over equal-shape arrays.

    Performs the same t*t table lookups and shifted accumulation, one slice
    pair at a time across the whole batch.
    """
    params = bank.params
    if 2 * params.B > 62:
        raise ParameterError("batch path needs 2*B <= 62 to accumulate in int64")
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.size and (x.min() < 0 or x.max() >> params.B or y.min() < 0 or y.max() >> params.B):
        raise RangeError(f"batch operands must be unsigned {params.B}-bit values")
    p, mask, t = params.p, params.mask, params.t
    xs = [(x >> (p * k)) & mask for k in range(t)]
    ys = [(y >> (p * k)) & mask for k in range(t)]
    acc = np.zeros(np.broadcast(x, y).shape, dtype=np.int64)
    for i in range(t):
        for k in range(t):
            acc += bank.table(i, k)[xs[i], ys[k]] << (p * (i + k))
    return acc


def bsm_mul_signed_batch(x: np.ndarray, y: np.ndarray, bank: LutBank | None = None) -> np.ndarray:
    bank = bank or default_bank()
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    lo, hi = -(1 << (bank.params.B - 1)), (1 << (bank.params.B - 1)) - 1
    if x.size and (x.min() < lo or x.max() > hi or y.min() < lo or y.max() > hi):
        raise RangeError(f"batch operands must be signed {bank.params.B}-bit values")
    mag = bsm_mul_unsigned_batch(np.abs(x), np.abs(y), bank)
    return np.where((x < 0) != (y < 0), -mag, mag)


def format_partials(product: BsmProduct, params: SliceParams) -> str:
    """Text dump of the partial-product matrix, one row per multiplicand slice."""
    width = (2 * params.B + 3) // 4
    lines = [f"# partials t={params.t} p={params.p} (row i = X slice, col k = Y slice)"]
    for i, row in enumerate(product.partials):
        lines.append(f"{i}: " + " ".join(f"{v:0{width}X}" for v in row))
    lines.append(f"sum: {product.value:0{width}X}")
    return "\n".join(lines)
