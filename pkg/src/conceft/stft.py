"""Short-time Fourier transform, its companion transforms, and a scalogram baseline.

The STFT convention modulates around the frame time: ``V(t, nu) = sum_tau
f(tau) h(tau - t) exp(-i 2 pi nu (tau - t)) dtau``, so a pure tone's
coefficients advance in phase as ``exp(i 2 pi f0 t)``. The reassignment rules
in :mod:`conceft.sst` are derived under this convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .signal import COMPLEX, POWER, Signal, TimeFrequencyGrid
from .windows import WindowFamily


def next_fast_fft(window_length: int) -> int:
    """Default FFT size: next power of two >= 4x the window length."""
    n = 1
    while n < 4 * window_length:
        n *= 2
    return n


@dataclass
class Lattice:
    """Analysis lattice shared by the time-frequency transforms."""

    hop_samples: int = 1
    n_fft: int | None = None

    def resolve_n_fft(self, window_length: int) -> int:
        n_fft = self.n_fft if self.n_fft is not None else next_fast_fft(window_length)
        if n_fft < window_length:
            raise ValueError("n_fft must be at least the window length")
        return n_fft

    def frame_centers(self, n_samples: int) -> np.ndarray:
        if self.hop_samples < 1:
            raise ValueError("hop must be >= 1")
        return np.arange(0, n_samples, self.hop_samples)


@dataclass
class StftFamily:
    """The five STFT variants consumed by the reassignment rules.

    All grids share one (time, frequency) lattice. ``v_h`` is the plain STFT;
    the others use the derivative / time-weighted companion windows.
    """

    v_h: TimeFrequencyGrid
    v_dh: TimeFrequencyGrid
    v_ddh: TimeFrequencyGrid
    v_th: TimeFrequencyGrid
    v_tdh: TimeFrequencyGrid
    window_meta: dict = field(default_factory=dict)
    hop_samples: int = 1

    @property
    def times_s(self) -> np.ndarray:
        return self.v_h.times_s

    @property
    def freqs_hz(self) -> np.ndarray:
        return self.v_h.freqs_hz

    def grids(self) -> tuple[TimeFrequencyGrid, ...]:
        return (self.v_h, self.v_dh, self.v_ddh, self.v_th, self.v_tdh)


def _framed(signal: Signal, length: int, centers: np.ndarray):
    """Zero-padded frames of ``length`` samples around each center."""
    half = (length - 1) // 2
    padded = np.concatenate(
        [np.zeros(half, np.complex128), signal.samples, np.zeros(half, np.complex128)]
    )
    frames = padded[centers[:, None] + np.arange(length)[None, :]]
    boundary = (centers - half < 0) | (centers + half > signal.n_samples - 1)
    return frames, boundary


def _windowed_fft(frames: np.ndarray, window_row: np.ndarray, n_fft: int,
                  sample_rate_hz: float) -> np.ndarray:
    """Per-frame DFT with the window's centered time axis, one-sided output."""
    length = window_row.size
    half = (length - 1) // 2
    idx = np.arange(-half, half + 1) % n_fft
    buf = np.zeros((frames.shape[0], n_fft), dtype=np.complex128)
    buf[:, idx] = frames * window_row[None, :]
    spec = np.fft.fft(buf, axis=1)[:, : n_fft // 2 + 1]
    return spec / sample_rate_hz


def stft(signal: Signal, window: WindowFamily, lattice: Lattice | None = None) -> TimeFrequencyGrid:
    """STFT of a signal with a single window, on the nonnegative frequency axis.

    Boundary frames (window support extending past the record) are computed
    with zero padding and flagged in ``meta['boundary']``.
    """
    fam = stft_family(signal, window, lattice, companions=False)
    return fam.v_h


def stft_family(signal: Signal, window: WindowFamily, lattice: Lattice | None = None,
                companions: bool = True) -> StftFamily:
    """The five companion STFTs of one signal on a shared lattice."""
    if window.J != 1:
        raise ValueError("stft expects a J=1 window family")
    if window.length_samples > signal.n_samples:
        raise ValueError("window longer than signal")
    if window.sample_rate_hz != signal.sample_rate_hz:
        raise ValueError("window and signal sample rates differ")
    lattice = lattice or Lattice()
    n_fft = lattice.resolve_n_fft(window.length_samples)
    centers = lattice.frame_centers(signal.n_samples)
    frames, boundary = _framed(signal, window.length_samples, centers)

    times = signal.t0_s + centers / signal.sample_rate_hz
    freqs = np.arange(n_fft // 2 + 1) * signal.sample_rate_hz / n_fft
    meta = {"boundary": boundary, "window": dict(window.meta), "n_fft": n_fft}

    rows = [window.windows[0]]
    if companions:
        rows += [window.d_windows[0], window.dd_windows[0],
                 window.t_windows[0], window.td_windows[0]]
    grids = [
        TimeFrequencyGrid(
            times_s=times, freqs_hz=freqs,
            values=_windowed_fft(frames, row, n_fft, signal.sample_rate_hz),
            kind=COMPLEX, meta=dict(meta),
        )
        for row in rows
    ]
    if not companions:
        grids = grids + [grids[0]] * 4
    return StftFamily(*grids, window_meta=dict(window.meta), hop_samples=lattice.hop_samples)


def combine_families(families: list[StftFamily], weights: np.ndarray) -> StftFamily:
    """Linear combination of STFT families, exploiting linearity in the window.

    ``sum_j w_j V^(h_j) = V^(sum_j w_j h_j)`` holds exactly for all five
    companion grids, which lets ConceFT reuse one set of per-window transforms
    for every random combination.
    """
    weights = np.asarray(weights, dtype=np.complex128)
    if weights.size != len(families):
        raise ValueError("one weight per family required")
    base = families[0]
    out = []
    for idx in range(5):
        values = sum(w * fam.grids()[idx].values for w, fam in zip(weights, families))
        g0 = base.grids()[idx]
        out.append(TimeFrequencyGrid(
            times_s=g0.times_s, freqs_hz=g0.freqs_hz, values=values,
            kind=COMPLEX, meta=dict(g0.meta),
        ))
    return StftFamily(*out, window_meta=dict(base.window_meta), hop_samples=base.hop_samples)


def scalogram(signal: Signal, n_voices: int, freq_range_hz: tuple[float, float],
              hop_samples: int = 1, mother_cycles: float = 6.0) -> TimeFrequencyGrid:
    """Squared-modulus continuous wavelet transform on a log-spaced frequency axis.

    The mother wavelet is an analytic Morlet with ``mother_cycles`` as the
    dimensionless center frequency; scales map to frequency through that
    center. This transform is a declared stand-in comparison baseline, not a
    contribution of the analysis pipeline; its parameters are exposed so the
    baseline can be tuned.
    """
    f_lo, f_hi = freq_range_hz
    fs = signal.sample_rate_hz
    if not (0 < f_lo < f_hi <= fs / 2):
        raise ValueError("frequency range must satisfy 0 < lo < hi <= fs/2")
    n_octaves = np.log2(f_hi / f_lo)
    n_scales = int(np.ceil(n_octaves * n_voices)) + 1
    freqs = f_lo * 2.0 ** (np.arange(n_scales) * n_octaves / max(n_scales - 1, 1))
    omega0 = mother_cycles

    n = signal.n_samples
    n_pad = 1
    while n_pad < 2 * n:
        n_pad *= 2
    X = np.fft.fft(signal.samples, n_pad)
    w_grid = 2 * np.pi * np.fft.fftfreq(n_pad, 1.0 / fs)
    centers = np.arange(0, n, hop_samples)

    values = np.zeros((centers.size, n_scales))
    prefac = np.sqrt(2.0) * np.pi ** (-0.25)
    for i, f in enumerate(freqs):
        s = omega0 / (2 * np.pi * f)
        # analytic Morlet, L1 filter scaling: every scale has unit peak gain,
        # so a stationary tone's ridge sits exactly on its own scale bin
        psi_hat = np.where(
            w_grid > 0, prefac * np.exp(-0.5 * (s * w_grid - omega0) ** 2), 0.0
        )
        row = np.fft.ifft(X * psi_hat.conj())[:n]
        values[:, i] = np.abs(row[centers]) ** 2

    times = signal.t0_s + centers / fs
    return TimeFrequencyGrid(
        times_s=times, freqs_hz=freqs, values=values, kind=POWER,
        meta={"transform": "scalogram", "mother": "morlet",
              "mother_cycles": mother_cycles, "n_voices": n_voices},
    )
