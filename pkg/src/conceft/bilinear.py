"""Wigner-Ville distribution and smoothed Cohen-class baselines (SPWV, CWD).

All three transforms work on the analytic extension of real inputs
(positive-frequency projection) to suppress mirror interference, and share
the frequency axis convention of the STFT: bins ``k * fs / n_fft`` for
``k = 0 .. n_fft/2``. With integer sample lags the kernel
``exp(-i 4 pi nu m / fs)`` is periodic in ``nu`` with period ``fs/2``, which
the analytic projection makes harmless for band-limited signals.

Negative values of these distributions are mathematically meaningful and are
retained; they are clipped only at export and at probability normalization.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .signal import REAL_SIGNED, Signal, TimeFrequencyGrid
from .stft import Lattice


@dataclass
class CohenConfig:
    """Smoothing window lengths (odd samples) and the CWD kernel width."""

    time_window_samples: int = 109
    freq_window_samples: int = 273
    cwd_sigma: float = 1.0

    def __post_init__(self):
        if self.time_window_samples % 2 == 0 or self.freq_window_samples % 2 == 0:
            raise ValueError("smoothing window lengths must be odd")
        if self.cwd_sigma <= 0:
            raise ValueError("cwd_sigma must be positive")

    @classmethod
    def from_time_window(cls, time_window_samples: int, cwd_sigma: float = 1.0):
        """Frequency smoothing window defaults to 2.5x the time window length."""
        freq = int(round(2.5 * time_window_samples))
        if freq % 2 == 0:
            freq += 1
        return cls(time_window_samples, freq, cwd_sigma)


def analytic_signal(signal: Signal) -> np.ndarray:
    """Positive-frequency projection; complex inputs are returned unchanged."""
    if not signal.real_valued:
        return signal.samples
    x = signal.samples.real
    n = x.size
    X = np.fft.fft(x)
    w = np.zeros(n)
    w[0] = 1.0
    if n % 2 == 0:
        w[n // 2] = 1.0
        w[1 : n // 2] = 2.0
    else:
        w[1 : (n + 1) // 2] = 2.0
    return np.fft.ifft(X * w)


def _hann(length: int) -> np.ndarray:
    # odd-length symmetric Hann, peak value 1 at the center sample
    m = np.arange(length) - (length - 1) / 2
    return 0.5 + 0.5 * np.cos(2 * np.pi * m / (length + 1))


def _lag_products(x: np.ndarray, centers: np.ndarray, lags: np.ndarray) -> np.ndarray:
    """Matrix ``x[c+m] * conj(x[c-m])`` with zero padding outside the record."""
    n = x.size
    pad = int(np.abs(lags).max())
    xp = np.concatenate([np.zeros(pad, np.complex128), x, np.zeros(pad, np.complex128)])
    plus = xp[centers[:, None] + lags[None, :] + pad]
    minus = xp[centers[:, None] - lags[None, :] + pad]
    return plus * np.conj(minus)


def _lag_fft(kernel: np.ndarray, lags: np.ndarray, n_fft: int) -> np.ndarray:
    """FFT over the lag axis on the doubled-lag grid, one-sided in frequency."""
    buf = np.zeros((kernel.shape[0], n_fft), dtype=np.complex128)
    buf[:, (2 * lags) % n_fft] = kernel
    return np.fft.fft(buf, axis=1)[:, : n_fft // 2 + 1]


def _grid(signal, centers, n_fft, values, meta):
    times = signal.t0_s + centers / signal.sample_rate_hz
    freqs = np.arange(n_fft // 2 + 1) * signal.sample_rate_hz / n_fft
    return TimeFrequencyGrid(times_s=times, freqs_hz=freqs, values=values,
                             kind=REAL_SIGNED, meta=meta)


def wigner_ville(signal: Signal, lattice: Lattice | None = None) -> TimeFrequencyGrid:
    """Discrete Wigner-Ville distribution (real-valued, may be negative)."""
    lattice = lattice or Lattice()
    n_fft = lattice.n_fft if lattice.n_fft is not None else 1024
    centers = lattice.frame_centers(signal.n_samples)
    x = analytic_signal(signal)
    max_lag = min(n_fft // 2 - 1, signal.n_samples - 1)
    lags = np.arange(-max_lag, max_lag + 1)
    kernel = _lag_products(x, centers, lags)
    values = _lag_fft(kernel, lags, n_fft).real * (2.0 / signal.sample_rate_hz)
    return _grid(signal, centers, n_fft, values, {"transform": "wvd"})


def _smoothed_bilinear(signal: Signal, config: CohenConfig, lattice: Lattice,
                       lag_weights_fn, name: str) -> TimeFrequencyGrid:
    n_fft = lattice.n_fft if lattice.n_fft is not None else 1024
    if config.time_window_samples > signal.n_samples:
        raise ValueError("time smoothing window longer than signal")
    centers = lattice.frame_centers(signal.n_samples)
    x = analytic_signal(signal)

    half_lag = min((config.freq_window_samples - 1) // 2, n_fft // 2 - 1,
                   signal.n_samples - 1)
    lags = np.arange(-half_lag, half_lag + 1)
    p = _hann(2 * half_lag + 1)  # lag window, peak 1 at m = 0

    half_u = (config.time_window_samples - 1) // 2
    u = np.arange(-half_u, half_u + 1)
    q = _hann(config.time_window_samples)
    q = q / q.sum()  # time smoother averages

    pad = half_lag + half_u
    xp = np.concatenate([np.zeros(pad, np.complex128), x, np.zeros(pad, np.complex128)])
    base = centers[:, None] + u[None, :] + pad

    kernel = np.zeros((centers.size, lags.size), dtype=np.complex128)
    for i, m in enumerate(lags):
        w = lag_weights_fn(q, u, m)
        prod = xp[base + m] * np.conj(xp[base - m])
        kernel[:, i] = prod @ w
    kernel *= p[None, :]

    values = _lag_fft(kernel, lags, n_fft).real * (2.0 / signal.sample_rate_hz)
    return _grid(signal, centers, n_fft, values,
                 {"transform": name, "config": vars(config).copy()})


def spwv(signal: Signal, config: CohenConfig,
         lattice: Lattice | None = None) -> TimeFrequencyGrid:
    """Smoothed pseudo Wigner-Ville: separable Hann smoothing in time and lag."""
    return _smoothed_bilinear(
        signal, config, lattice or Lattice(), lambda q, u, m: q, "spwv",
    )


def cwd(signal: Signal, config: CohenConfig,
        lattice: Lattice | None = None) -> TimeFrequencyGrid:
    """Choi-Williams distribution: exponential ambiguity-domain kernel.

    In the time-lag domain the exponential kernel becomes a Gaussian time
    smoother whose width grows with the lag; it is windowed by the configured
    Hann time window and normalized per lag.
    """
    sigma = config.cwd_sigma

    def weights(q, u, m):
        if m == 0:
            w = np.zeros_like(q)
            w[u == 0] = 1.0
            return w
        w = q * np.exp(-sigma * u.astype(float) ** 2 / (16.0 * m * m))
        return w / w.sum()

    return _smoothed_bilinear(signal, config, lattice or Lattice(), weights, "cwd")
