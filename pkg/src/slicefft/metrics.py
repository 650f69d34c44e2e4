"""Quantization SNR of the fixed-point FFT against a double-precision DFT."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from .errors import DegenerateReferenceError, ParameterError, SizeError
from .fft import FftConfig, run_frames_raw
from .golden import dft_naive

# snr_db returns this when the test vector matches the reference exactly
EXACT = math.inf

Reference = Literal["quantized", "unquantized"]


def snr_db(reference: Sequence[complex], test, scale_factor: float = 1.0) -> float:
    """``10*log10(sum|ref|^2 / sum|ref - test/scale|^2)``.

    ``test`` may be a sequence of ComplexFixed or plain complex values.
    """
    ref = np.asarray(reference, dtype=np.complex128)
    tst = np.asarray([complex(v) for v in test], dtype=np.complex128) / scale_factor
    if ref.shape != tst.shape:
        raise SizeError(f"reference has {ref.size} bins, test has {tst.size}")
    signal = float(np.sum(ref.real**2 + ref.imag**2))
    if signal == 0.0:
        raise DegenerateReferenceError("reference spectrum has zero power")
    err = ref - tst
    noise = float(np.sum(err.real**2 + err.imag**2))
    if noise == 0.0:
        return EXACT
    return 10.0 * math.log10(signal / noise)


@dataclass
class TrialVectors:
    frame_re: np.ndarray
    frame_im: np.ndarray
    reference: np.ndarray
    test_re: np.ndarray
    test_im: np.ndarray


@dataclass
class SnrReport:
    per_trial_db: list[float]
    mean_db: float
    trials: int
    cfg_echo: str
    seed: int
    amplitude: float
    reference: str = "quantized"
    vectors: list[TrialVectors] = field(default_factory=list, repr=False)

    def to_text(self) -> str:
        lines = [
            "# snr-bench report",
            f"cfg: {self.cfg_echo}",
            f"seed: {self.seed}",
            f"amplitude: {self.amplitude!r}",
            f"reference: {self.reference}",
            f"trials: {self.trials}",
            f"mean_db: {self.mean_db!r}",
        ]
        lines += [f"trial {i}: {v!r}" for i, v in enumerate(self.per_trial_db)]
        return "\n".join(lines) + "\n"


def random_frames(cfg: FftConfig, trials: int, seed: int, amplitude: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform complex frames, returned as float image plus quantized raw counts."""
    rng = np.random.default_rng(seed)
    shape = (trials, cfg.n_points)
    values = rng.uniform(-amplitude, amplitude, shape) + 1j * rng.uniform(-amplitude, amplitude, shape)
    fmt = cfg.sample_fmt
    scale = float(1 << fmt.frac_bits)
    # np.rint rounds half to even, matching make_fixed's nearest-even
    re = np.clip(np.rint(values.real * scale), fmt.min_raw, fmt.max_raw).astype(np.int64)
    im = np.clip(np.rint(values.imag * scale), fmt.min_raw, fmt.max_raw).astype(np.int64)
    return values, re, im


def snr_bench(
    cfg: FftConfig | None = None,
    trials: int = 100,
    seed: int = 0,
    amplitude: float = 0.9,
    reference: Reference = "quantized",
    keep_vectors: bool = False,
) -> SnrReport:
    cfg = cfg or FftConfig()
    if trials < 1:
        raise ParameterError("trials must be >= 1")
    if not 0.0 < amplitude <= 1.0:
        raise ParameterError("amplitude must be in (0, 1]")
    if reference not in ("quantized", "unquantized"):
        raise ParameterError(f"unknown reference {reference!r}")
    values, re, im = random_frames(cfg, trials, seed, amplitude)
    scale = float(1 << cfg.sample_fmt.frac_bits)
    source = (re + 1j * im) / scale if reference == "quantized" else values
    refs = dft_naive(source)
    out_re, out_im = run_frames_raw(re, im, cfg)
    out_scale = float(1 << cfg.sample_fmt.frac_bits)
    per_trial = []
    vectors = []
    for t in range(trials):
        test = (out_re[t] + 1j * out_im[t]) / out_scale
        per_trial.append(snr_db(refs[t], test, cfg.scale_factor))
        if keep_vectors:
            vectors.append(TrialVectors(re[t], im[t], refs[t], out_re[t], out_im[t]))
    return SnrReport(
        per_trial_db=per_trial,
        mean_db=float(sum(per_trial) / trials),
        trials=trials,
        cfg_echo=cfg.describe(),
        seed=seed,
        amplitude=amplitude,
        reference=reference,
        vectors=vectors,
    )
