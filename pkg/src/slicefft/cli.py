"""``slicefft`` command-line tool.

Exit status: 0 success, 2 bad arguments, 3 malformed input file or format
mismatch, 4 size or range violation, 5 self-check mismatch.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import conv as conv_mod
from .bsm import DEFAULT_PARAMS, bsm_mul_signed, bsm_mul_unsigned, default_bank, format_partials
from .errors import (
    DegenerateReferenceError,
    FormatMismatchError,
    ParameterError,
    RangeError,
    SelfCheckError,
    SizeError,
)
from .fft import FftConfig, FftPipeline, gen_twiddle_rom
from .fileio import (
    format_floats,
    format_rom,
    format_samples,
    read_frame,
    read_words,
    trace_header,
    trace_row,
    write_samples,
)
from .fixedpoint import FixedWord, Format, wrap_raw
from .golden import dft_naive, direct_conv, fixed_dif
from .metrics import snr_bench, snr_db

EXIT_ARGS = 2
EXIT_FORMAT = 3
EXIT_SIZE = 4
EXIT_MISMATCH = 5


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_mul(args) -> int:
    fmt = Format(16, 0)
    for v in (args.x, args.y):
        if not fmt.contains(v):
            raise RangeError(f"{v} is not a signed 16-bit integer")
    bank = default_bank()
    x, y = FixedWord(args.x, fmt), FixedWord(args.y, fmt)
    product = bsm_mul_signed(x, y, bank)
    print(product.raw)
    if args.partials:
        print(format_partials(bsm_mul_unsigned(abs(args.x), abs(args.y), bank), DEFAULT_PARAMS))
    return 0


def cmd_conv(args) -> int:
    fx, x = read_words(args.x_file)
    fh, h = read_words(args.h_file)
    if fx != conv_mod.SAMPLE_FMT or fh != conv_mod.SAMPLE_FMT:
        raise FormatMismatchError(f"conv samples must be {conv_mod.SAMPLE_FMT}")
    result = conv_mod.run(x, h, keep_trace=bool(args.trace))
    write_samples(args.out, result.y, Format(conv_mod.ACC_BITS, 0), False)
    if args.trace:
        rows = [trace_header() + " demux"]
        for rep in result.trace:
            demux = ",".join(f"{i}:{v}" for i, v in rep.products_routed) or "-"
            emit = None if rep.emitted is None else (rep.emitted[1], 0)
            idx = None if rep.emitted is None else rep.emitted[0]
            rows.append(trace_row(rep.cycle, [bool(rep.products_routed)], idx, emit, rep.rcv, f"demux={demux}"))
        _write(args.trace, "\n".join(rows) + "\n")
    print(f"outputs={len(result.y)} cycles_used={result.cycles_used} overflow_any={int(result.overflow_any)}")
    if args.oracle:
        ref = [wrap_raw(v, conv_mod.ACC_BITS) for v in direct_conv([w.raw for w in x], [w.raw for w in h])]
        for t, (a, b) in enumerate(zip(result.y, ref)):
            print(f"{t} engine={a} oracle={b}")
        if result.y != ref:
            raise SelfCheckError("engine output differs from direct convolution")
    return 0


def _fft_config(args, sample_fmt: Format, n_points: int) -> FftConfig:
    return FftConfig(
        n_points=n_points,
        sample_fmt=sample_fmt,
        twiddle_fmt=Format(args.twiddle_bits, args.twiddle_frac),
        internal_fmt=Format(args.internal_bits, args.internal_frac),
        scaling=args.scaling,
        narrowing=args.narrowing,
        narrow_point=args.narrow_point,
        multiplier=args.multiplier,
    )


def _add_fft_flags(p: argparse.ArgumentParser, with_sample: bool = False) -> None:
    p.add_argument("--internal-bits", type=int, default=24)
    p.add_argument("--internal-frac", type=int, default=22)
    p.add_argument("--twiddle-bits", type=int, default=24)
    p.add_argument("--twiddle-frac", type=int, default=22)
    p.add_argument("--scaling", choices=("per-stage-half", "none-wrap"), default="per-stage-half")
    p.add_argument("--narrowing", choices=("truncate", "nearest-even"), default="truncate")
    p.add_argument("--narrow-point", choices=("output", "stage"), default="output")
    p.add_argument("--multiplier", choices=("exact", "bsm"), default="exact")
    if with_sample:
        p.add_argument("--n", type=int, default=64, help="FFT size")
        p.add_argument("--sample-bits", type=int, default=12)
        p.add_argument("--sample-frac", type=int, default=11)


def cmd_fft(args) -> int:
    fmt, frame = read_frame(args.frame_file)
    cfg = _fft_config(args, fmt, args.n)
    if len(frame) != cfg.n_points:
        raise SizeError(f"frame has {len(frame)} samples, expected {cfg.n_points}")
    pipe = FftPipeline(cfg)
    result = pipe.run_frame(frame, keep_reports=bool(args.trace))
    write_samples(args.out, [x.raw for x in result.spectrum], cfg.sample_fmt, True)
    if args.trace:
        rows = [trace_header()]
        for rep in result.reports:
            idx, emit = (None, None) if rep.emitted is None else (rep.emitted[0], rep.emitted[1].raw)
            rows.append(trace_row(rep.cycle, rep.stage_outputs_valid, idx, emit, rep.rcv))
        _write(args.trace, "\n".join(rows) + "\n")
    print(
        f"latency_cycles={result.latency_cycles} sort_cycles={result.sort_cycles} "
        f"scale_factor={result.scale_factor!r}"
    )
    if args.golden in ("float", "both"):
        ref = dft_naive([complex(x) for x in frame])
        print(f"snr_db={snr_db(ref, result.spectrum, result.scale_factor)!r}")
    if args.golden in ("fixed", "both"):
        gold = fixed_dif(frame, cfg)
        mismatches = [k for k, (a, b) in enumerate(zip(result.spectrum, gold)) if a.raw != b.raw]
        print(f"golden_fixed={'match' if not mismatches else 'MISMATCH'}")
        if mismatches:
            raise SelfCheckError(f"pipeline differs from fixed_dif at bins {mismatches}")
    return 0


def cmd_twiddle_gen(args) -> int:
    rom = gen_twiddle_rom(args.n, Format(args.total, args.frac))
    _write(args.out, format_rom(rom))
    return 0


def cmd_snr_bench(args) -> int:
    if args.trials < 1:
        raise ParameterError("--trials must be >= 1")
    cfg = _fft_config(args, Format(args.sample_bits, args.sample_frac), args.n)
    report = snr_bench(
        cfg,
        trials=args.trials,
        seed=args.seed,
        amplitude=args.amplitude,
        reference=args.reference,
        keep_vectors=bool(args.dump_vectors),
    )
    _write(args.out, report.to_text())
    if args.dump_vectors:
        out = Path(args.dump_vectors)
        out.mkdir(parents=True, exist_ok=True)
        for t, vec in enumerate(report.vectors):
            (out / f"trial_{t:04d}_input.txt").write_text(
                format_samples(list(zip(vec.frame_re.tolist(), vec.frame_im.tolist())), cfg.sample_fmt, True)
            )
            (out / f"trial_{t:04d}_ref.txt").write_text(format_floats(vec.reference))
            (out / f"trial_{t:04d}_test.txt").write_text(
                format_samples(list(zip(vec.test_re.tolist(), vec.test_im.tolist())), cfg.sample_fmt, True)
            )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="slicefft", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mul", help="16-bit signed multiply through the bit slicing multiplier")
    p.add_argument("x", type=int)
    p.add_argument("y", type=int)
    p.add_argument("--partials", action="store_true", help="dump the partial-product matrix")
    p.set_defaults(func=cmd_mul)

    p = sub.add_parser("conv", help="run the streaming convolution engine")
    p.add_argument("x_file")
    p.add_argument("h_file")
    p.add_argument("out")
    p.add_argument("--trace")
    p.add_argument("--oracle", action="store_true", help="compare against direct convolution")
    p.set_defaults(func=cmd_conv)

    p = sub.add_parser("fft", help="run one frame through the SDF pipeline")
    p.add_argument("frame_file")
    p.add_argument("out")
    p.add_argument("--trace")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--golden", choices=("fixed", "float", "both"))
    _add_fft_flags(p)
    p.set_defaults(func=cmd_fft)

    p = sub.add_parser("twiddle-gen", help="dump a twiddle ROM")
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--total", type=int, default=24)
    p.add_argument("--frac", type=int, default=22)
    p.add_argument("out", nargs="?", default="-")
    p.set_defaults(func=cmd_twiddle_gen)

    p = sub.add_parser("snr-bench", help="mean SNR of the fixed pipeline over random frames")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--amplitude", type=float, default=0.9)
    p.add_argument("--reference", choices=("quantized", "unquantized"), default="quantized")
    p.add_argument("--dump-vectors", metavar="DIR")
    p.add_argument("--out", default="-")
    _add_fft_flags(p, with_sample=True)
    p.set_defaults(func=cmd_snr_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SelfCheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except (SizeError, RangeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE
    except FormatMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (ParameterError, DegenerateReferenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ARGS


if __name__ == "__main__":
    sys.exit(main())
