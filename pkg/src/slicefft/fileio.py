"""Plain-text file formats used by the command-line tool.

Sample file::

    # fmt total=12 frac=11 complex=1
    <re_raw> <im_raw>
    ...

Real-valued files (``complex=0``) carry one raw count per line. Float
reference vectors use the same layout with a ``# float complex=1`` header
and ``repr`` floats so they re-read exactly.
"""

from __future__ import annotations

import re
from pathlib import Path
from typing import Iterable, Sequence

from .errors import FormatMismatchError
from .fft import TwiddleRom
from .fixedpoint import ComplexFixed, FixedWord, Format

_HEADER = re.compile(r"#\s*fmt\s+total=(\d+)\s+frac=(\d+)\s+complex=([01])\s*$")
_FLOAT_HEADER = re.compile(r"#\s*float\s+complex=([01])\s*$")


def _body(lines: Iterable[str]) -> list[str]:
    return [ln for ln in (raw.strip() for raw in lines) if ln and not ln.startswith("#")]


def parse_samples(text: str) -> tuple[Format, bool, list[tuple[int, int]]]:
    lines = text.splitlines()
    if not lines:
        raise FormatMismatchError("empty sample file")
    m = _HEADER.match(lines[0].strip())
    if not m:
        raise FormatMismatchError(f"bad sample header: {lines[0]!r}")
    try:
        fmt = Format(int(m.group(1)), int(m.group(2)))
    except ValueError as exc:
        raise FormatMismatchError(str(exc)) from exc
    is_complex = m.group(3) == "1"
    values = []
    for n, ln in enumerate(_body(lines[1:]), start=2):
        fields = ln.split()
        if len(fields) != (2 if is_complex else 1):
            raise FormatMismatchError(f"line {n}: expected {2 if is_complex else 1} fields, got {ln!r}")
        try:
            nums = [int(f) for f in fields]
        except ValueError as exc:
            raise FormatMismatchError(f"line {n}: {exc}") from exc
        for v in nums:
            if not fmt.contains(v):
                raise FormatMismatchError(f"line {n}: {v} does not fit {fmt}")
        values.append((nums[0], nums[1] if is_complex else 0))
    return fmt, is_complex, values


def read_samples(path: str | Path) -> tuple[Format, bool, list[tuple[int, int]]]:
    return parse_samples(Path(path).read_text())


def format_samples(values: Sequence[tuple[int, int]] | Sequence[int], fmt: Format, is_complex: bool) -> str:
    lines = [f"# fmt total={fmt.total_bits} frac={fmt.frac_bits} complex={int(is_complex)}"]
    for v in values:
        if is_complex:
            lines.append(f"{v[0]} {v[1]}")
        else:
            lines.append(str(v[0] if isinstance(v, tuple) else v))
    return "\n".join(lines) + "\n"


def write_samples(path: str | Path, values, fmt: Format, is_complex: bool) -> None:
    Path(path).write_text(format_samples(values, fmt, is_complex))


def read_words(path: str | Path) -> tuple[Format, list[FixedWord]]:
    fmt, _, values = read_samples(path)
    return fmt, [FixedWord(r, fmt) for r, _ in values]


def read_frame(path: str | Path) -> tuple[Format, list[ComplexFixed]]:
    fmt, _, values = read_samples(path)
    return fmt, [ComplexFixed.from_raw(r, i, fmt) for r, i in values]


def format_floats(values: Sequence[complex]) -> str:
    lines = ["# float complex=1"]
    lines += [f"{complex(v).real!r} {complex(v).imag!r}" for v in values]
    return "\n".join(lines) + "\n"


def parse_floats(text: str) -> list[complex]:
    lines = text.splitlines()
    if not lines or not _FLOAT_HEADER.match(lines[0].strip()):
        raise FormatMismatchError("bad float header")
    out = []
    for ln in _body(lines[1:]):
        a, b = ln.split()
        out.append(complex(float(a), float(b)))
    return out


def hex_word(raw: int, total_bits: int) -> str:
    digits = (total_bits + 3) // 4
    return f"{raw & ((1 << total_bits) - 1):0{digits}X}"


def format_rom(rom: TwiddleRom) -> str:
    fmt = rom.fmt
    lines = [f"# fmt total={fmt.total_bits} frac={fmt.frac_bits} n={rom.n_stage}"]
    for k, (re_raw, im_raw) in enumerate(rom.raw):
        lines.append(f"{k} {hex_word(re_raw, fmt.total_bits)} {hex_word(im_raw, fmt.total_bits)}")
    return "\n".join(lines) + "\n"


def trace_header() -> str:
    return "# cycle stage_valids emit_idx emit rcv"


def trace_row(cycle: int, valids: Sequence[bool], emit_idx: int | None, emit: tuple[int, int] | None, rcv: bool, extra: str = "") -> str:
    bits = "".join("1" if v else "0" for v in valids)
    idx = "-" if emit_idx is None else str(emit_idx)
    val = "-" if emit is None else f"{emit[0]},{emit[1]}"
    row = f"cycle={cycle} stage_valids={bits} emit_idx={idx} emit={val} rcv={int(rcv)}"
    return f"{row} {extra}" if extra else row


_TRACE_ROW = re.compile(
    r"cycle=(\d+) stage_valids=([01]*) emit_idx=(-|\d+) emit=(-|-?\d+,-?\d+) rcv=([01])(?: (.*))?$"
)


def parse_trace(text: str) -> list[dict]:
    rows = []
    for ln in _body(text.splitlines()):
        m = _TRACE_ROW.match(ln)
        if not m:
            raise FormatMismatchError(f"bad trace row: {ln!r}")
        emit = None if m.group(4) == "-" else tuple(int(v) for v in m.group(4).split(","))
        rows.append(
            {
                "cycle": int(m.group(1)),
                "stage_valids": [c == "1" for c in m.group(2)],
                "emit_idx": None if m.group(3) == "-" else int(m.group(3)),
                "emit": emit,
                "rcv": m.group(5) == "1",
                "extra": m.group(6) or "",
            }
        )
    return rows
