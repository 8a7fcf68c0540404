"""Core waveform and time-frequency grid types, noise injection, SNR bookkeeping.

All types are plain value containers; treat them as immutable after
construction. Operations are pure functions, safe to call from concurrent
workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

COMPLEX = "complex_coefficients"
POWER = "power"
# bilinear distributions are real but legitimately negative; they are clipped
# only at probability normalization and heatmap export
REAL_SIGNED = "real_signed"


@dataclass
class Signal:
    """Uniformly sampled waveform.

    samples are stored complex; ``real_valued`` records that the underlying
    signal is real (zero imaginary part) so analysis can restrict to
    nonnegative frequencies.
    """

    samples: np.ndarray
    sample_rate_hz: float
    t0_s: float = 0.0
    real_valued: bool = False

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.complex128)
        if self.samples.ndim != 1 or self.samples.size == 0:
            raise ValueError("samples must be a nonempty 1-D sequence")
        if not self.sample_rate_hz > 0:
            raise ValueError("sample_rate_hz must be positive")
        if self.real_valued and np.any(self.samples.imag != 0):
            raise ValueError("real_valued signal has nonzero imaginary part")

    @property
    def n_samples(self) -> int:
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.n_samples / self.sample_rate_hz

    @property
    def times_s(self) -> np.ndarray:
        return self.t0_s + np.arange(self.n_samples) / self.sample_rate_hz

    def power(self) -> float:
        """Mean squared modulus over the full record."""
        return float(np.mean(np.abs(self.samples) ** 2))


@dataclass
class TimeFrequencyGrid:
    """Matrix over (time frame, frequency bin) axes.

    ``kind`` is either ``complex_coefficients`` (complex values) or ``power``
    (nonnegative real values). ``meta`` carries analysis provenance such as
    boundary-frame flags, thresholds and dropped-mass fractions; it is
    informational and never consulted by numerical kernels.
    """

    times_s: np.ndarray
    freqs_hz: np.ndarray
    values: np.ndarray
    kind: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times_s = np.asarray(self.times_s, dtype=float)
        self.freqs_hz = np.asarray(self.freqs_hz, dtype=float)
        if self.kind not in (COMPLEX, POWER, REAL_SIGNED):
            raise ValueError(f"unknown grid kind {self.kind!r}")
        self.values = np.asarray(
            self.values, dtype=np.complex128 if self.kind == COMPLEX else np.float64
        )
        if self.values.shape != (self.times_s.size, self.freqs_hz.size):
            raise ValueError("values shape must be (n_times, n_freqs)")
        if np.any(np.diff(self.times_s) <= 0):
            raise ValueError("times_s must be strictly increasing")
        if np.any(np.diff(self.freqs_hz) <= 0) or self.freqs_hz[0] < 0:
            raise ValueError("freqs_hz must be strictly increasing and nonnegative")
        if self.kind == POWER and np.any(self.values < 0):
            raise ValueError("power grid must be nonnegative")

    @property
    def n_times(self) -> int:
        return self.times_s.size

    @property
    def n_freqs(self) -> int:
        return self.freqs_hz.size

    def interior_mask(self) -> np.ndarray:
        """True for frames not flagged as boundary frames."""
        boundary = self.meta.get("boundary")
        if boundary is None:
            return np.ones(self.n_times, dtype=bool)
        return ~np.asarray(boundary, dtype=bool)


@dataclass
class NoiseRealization:
    """Record of one noise draw: seed, achieved per-sample RMS, requested SNR."""

    seed: int
    sigma: float
    snr_db: float | None = None

    def __post_init__(self):
        clean = self.snr_db is not None and math.isinf(self.snr_db)
        if not (self.sigma > 0 or (clean and self.sigma == 0)):
            raise ValueError("sigma must be positive")


def add_noise(signal: Signal, snr_db: float, seed: int) -> tuple[Signal, NoiseRealization]:
    """Add white Gaussian noise at an exact signal-to-noise ratio.

    The noise is drawn i.i.d. per sample (real noise for real-valued signals,
    circular complex noise otherwise) and then rescaled so that
    ``10*log10(mean signal power / mean noise power)`` over the full record
    equals ``snr_db`` exactly. ``snr_db = inf`` is the clean sentinel and
    returns the input signal unchanged.
    """
    p_signal = signal.power()
    if p_signal == 0:
        raise ValueError("degenerate signal: zero power")
    if math.isinf(snr_db) and snr_db > 0:
        return signal, NoiseRealization(seed=seed, sigma=0.0, snr_db=snr_db)
    rng = np.random.default_rng(seed)
    if signal.real_valued:
        raw = rng.standard_normal(signal.n_samples).astype(np.complex128)
    else:
        raw = rng.standard_normal(signal.n_samples) + 1j * rng.standard_normal(
            signal.n_samples
        )
    p_raw = float(np.mean(np.abs(raw) ** 2))
    p_target = p_signal * 10.0 ** (-snr_db / 10.0)
    scale = math.sqrt(p_target / p_raw)
    noisy = Signal(
        samples=signal.samples + scale * raw,
        sample_rate_hz=signal.sample_rate_hz,
        t0_s=signal.t0_s,
        real_valued=signal.real_valued,
    )
    return noisy, NoiseRealization(seed=seed, sigma=math.sqrt(p_target), snr_db=snr_db)


def add_noise_sigma(signal: Signal, sigma: float, seed: int) -> tuple[Signal, NoiseRealization]:
    """Add white Gaussian noise with a fixed per-sample standard deviation.

    Companion to :func:`add_noise` that bypasses SNR scaling: the noise is
    N(0, sigma^2) per sample with no post-hoc rescaling.
    """
    if not sigma >= 0:
        raise ValueError("sigma must be nonnegative")
    rng = np.random.default_rng(seed)
    if signal.real_valued:
        noise = sigma * rng.standard_normal(signal.n_samples).astype(np.complex128)
    else:
        noise = (sigma / math.sqrt(2.0)) * (
            rng.standard_normal(signal.n_samples)
            + 1j * rng.standard_normal(signal.n_samples)
        )
    noisy = Signal(
        samples=signal.samples + noise,
        sample_rate_hz=signal.sample_rate_hz,
        t0_s=signal.t0_s,
        real_valued=signal.real_valued,
    )
    if sigma == 0:
        return noisy, NoiseRealization(seed=seed, sigma=0.0, snr_db=math.inf)
    return noisy, NoiseRealization(seed=seed, sigma=sigma, snr_db=None)


def measure_snr(clean: Signal, noisy: Signal) -> float:
    """Achieved SNR in dB: ``10*log10(P_clean / P_(noisy - clean))``."""
    if clean.n_samples != noisy.n_samples or clean.sample_rate_hz != noisy.sample_rate_hz:
        raise ValueError("signals must share length and sample rate")
    p_clean = clean.power()
    p_noise = float(np.mean(np.abs(noisy.samples - clean.samples) ** 2))
    if p_noise == 0:
        return math.inf
    return 10.0 * math.log10(p_clean / p_noise)


def to_power(grid: TimeFrequencyGrid) -> TimeFrequencyGrid:
    """Elementwise squared modulus of a complex coefficient grid."""
    if grid.kind != COMPLEX:
        raise ValueError("to_power requires a complex_coefficients grid")
    return TimeFrequencyGrid(
        times_s=grid.times_s,
        freqs_hz=grid.freqs_hz,
        values=np.abs(grid.values) ** 2,
        kind=POWER,
        meta=dict(grid.meta),
    )
