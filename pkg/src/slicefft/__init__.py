"""Bit-exact models of a bit slicing multiplier, a streaming convolution
engine and a radix-2 SDF DIF FFT pipeline, with reference oracles and an SNR
bench."""

from .bsm import (
    LutBank,
    SliceParams,
    bsm_mul_signed,
    bsm_mul_unsigned,
    build_lut_bank,
    slice_operand,
)
from .conv import ConvEngine, ConvResult
from .conv import run as conv_run
from .fft import FftConfig, FftPipeline, butterfly, gen_twiddle_rom, quantize_frame, run_frame, run_frames_raw
from .fixedpoint import ComplexFixed, FixedWord, Format, add, make_fixed, mul_full, resize, sub
from .golden import dft_naive, direct_conv, fft_dif_float, fixed_dif
from .metrics import snr_bench, snr_db

__version__ = "0.1.0"
