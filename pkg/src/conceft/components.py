"""Three-component ground-truth signal with Brownian-perturbed envelopes and IFs.

Each oscillatory component has a smoothed-Brownian amplitude envelope and an
instantaneous frequency built from a deterministic trend (a 1/t sweep, a
slow oscillation around 5 kHz, and a constant tone) plus a smoothed-Brownian
perturbation. The exact per-sample amplitude and frequency tracks are kept,
so an ideal time-frequency representation can be rendered for scoring.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .signal import POWER, Signal, TimeFrequencyGrid

SEED_WRAP_OFFSET = 2**32  # regeneration offset when a Brownian max is nonpositive


@dataclass
class BrownianEnvelope:
    """Realization of ``a + S_c(W) / (b max S_c(W))`` on a uniform grid.

    W is standard Brownian motion, S_c a locally weighted linear smoother with
    Gaussian kernel bandwidth ``c_ms``. The max over the support is ``a + 1/b``
    by construction. Realizations whose smoothed max is nonpositive are
    regenerated with a documented seed offset so the normalization stays
    well posed.
    """

    a: float
    b: float
    c_ms: float
    L_ms: float
    fs_hz: float
    values: np.ndarray
    seed: int
    attempts: int = 1

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        peak = self.a + 1.0 / self.b
        if abs(self.values.max() - peak) > 1e-9:
            raise ValueError("envelope max must equal a + 1/b")


def _local_linear_smooth(t: np.ndarray, y: np.ndarray, bandwidth: float) -> np.ndarray:
    """Gaussian-kernel local linear regression evaluated at the sample points."""
    d = t[None, :] - t[:, None]
    w = np.exp(-0.5 * (d / bandwidth) ** 2)
    m0 = w.sum(axis=1)
    m1 = (w * d).sum(axis=1)
    m2 = (w * d * d).sum(axis=1)
    b0 = w @ y
    b1 = (w * d) @ y
    det = m0 * m2 - m1 * m1
    return (m2 * b0 - m1 * b1) / det


def brownian_envelope(a: float, b: float, c_ms: float, L_ms: float, fs_hz: float,
                      seed: int) -> BrownianEnvelope:
    if b <= 0 or c_ms <= 0 or L_ms <= 0 or fs_hz <= 0 or a < 0:
        raise ValueError("invalid envelope parameters")
    n = int(round(L_ms * 1e-3 * fs_hz)) + 1
    t_ms = np.arange(n) * 1e3 / fs_hz
    dt_ms = t_ms[1] - t_ms[0]
    attempt = 0
    current = seed
    while True:
        attempt += 1
        rng = np.random.default_rng(current)
        increments = rng.standard_normal(n - 1) * math.sqrt(dt_ms)
        w = np.concatenate([[0.0], np.cumsum(increments)])
        smooth = _local_linear_smooth(t_ms, w, c_ms)
        peak = smooth.max()
        if peak > 0:
            break
        current = current + SEED_WRAP_OFFSET
    values = a + smooth / (b * peak)
    return BrownianEnvelope(a=a, b=b, c_ms=c_ms, L_ms=L_ms, fs_hz=fs_hz,
                            values=values, seed=seed, attempts=attempt)


@dataclass
class ComponentSpec:
    """One oscillatory component: envelope, phase and IF tracks on its support."""

    amplitude: np.ndarray
    phase_cycles: np.ndarray
    support_ms: tuple[float, float]
    if_hz: np.ndarray
    sample_indices: np.ndarray

    def __post_init__(self):
        n = self.amplitude.size
        if not (self.phase_cycles.size == n and self.if_hz.size == n
                and self.sample_indices.size == n):
            raise ValueError("component tracks must share a length")

    def complex_samples(self) -> np.ndarray:
        return self.amplitude * np.exp(2j * np.pi * self.phase_cycles)


@dataclass
class GroundTruth:
    """Synthesized signal, its components, and the ideal representation."""

    signal: Signal
    components: list[ComponentSpec]
    itfr: TimeFrequencyGrid
    seed: int
    master_seed: int
    meta: dict = field(default_factory=dict)


def _raised_cosine_taper(n: int, edge_samples: int) -> np.ndarray:
    taper = np.ones(n)
    e = min(edge_samples, n // 2)
    if e > 0:
        ramp = 0.5 * (1 - np.cos(np.pi * np.arange(e) / e))
        taper[:e] = ramp
        taper[-e:] = ramp[::-1]
    return taper


def _component_seed(master: int, component: int, role: int) -> int:
    return int(np.random.SeedSequence(
        [int(master), int(component), int(role)]).generate_state(1)[0])


def _cumtrapz(y: np.ndarray, dx: float) -> np.ndarray:
    out = np.zeros_like(y)
    out[1:] = np.cumsum(0.5 * (y[1:] + y[:-1])) * dx
    return out


def _build_components(seed: int, fs_hz: float, duration_ms: float, edge_ms: float):
    t_ms = np.arange(int(round(duration_ms * 1e-3 * fs_hz))) * 1e3 / fs_hz
    dt_ms = 1e3 / fs_hz
    specs = []
    # (support, amplitude family, IF family, deterministic IF trend in kHz)
    defs = [
        ((1.0, 20.0), (1.0, 2.0, 0.2), (1.0, 6.0, 0.3),
         lambda t: (120.0 / 19.0) / t + 13.0 / 19.0),
        ((2.0, 25.0), (0.5, 4.0, 0.1), (0.0, 5.0, 0.4),
         lambda t: 5.0 - 0.1 * np.pi * np.sin(np.pi * t)),
        ((3.0, 10.0), (1.0 / 3.0, 6.0, 0.1), None, lambda t: np.full_like(t, 3.141)),
    ]
    for ci, (support, amp_abc, if_abc, trend) in enumerate(defs):
        lo, hi = support
        idx = np.nonzero((t_ms >= lo) & (t_ms <= hi))[0]
        tc = t_ms[idx]
        span = tc[-1] - tc[0]
        amp = brownian_envelope(*amp_abc, L_ms=span, fs_hz=fs_hz,
                                seed=_component_seed(seed, ci, 0))
        amplitude = amp.values[: idx.size] * _raised_cosine_taper(
            idx.size, int(round(edge_ms * 1e-3 * fs_hz)))
        if_khz = trend(tc)
        if if_abc is not None:
            wobble = brownian_envelope(*if_abc, L_ms=span, fs_hz=fs_hz,
                                       seed=_component_seed(seed, ci, 1))
            if_khz = if_khz + wobble.values[: idx.size]
        if_hz = 1000.0 * if_khz
        phase_cycles = _cumtrapz(if_khz, dt_ms)  # kHz * ms = cycles
        specs.append(ComponentSpec(
            amplitude=amplitude, phase_cycles=phase_cycles,
            support_ms=support, if_hz=if_hz, sample_indices=idx,
        ))
    return t_ms, specs


def _components_valid(specs: list[ComponentSpec], n: int, min_sep_hz: float) -> bool:
    for spec in specs:
        if np.any(spec.if_hz <= 0):
            return False
        inner = spec.amplitude[1:-1] if spec.amplitude.size > 2 else spec.amplitude
        if np.any(inner <= 0):
            return False
    # components 1 and 3 intentionally cross (the sweep passes through the
    # constant tone), so separation is enforced for the pairs that can hold it
    tracks = []
    for spec in specs:
        track = np.full(n, np.nan)
        track[spec.sample_indices] = spec.if_hz
        tracks.append(track)
    for i, j in ((0, 1), (1, 2)):
        both = ~np.isnan(tracks[i]) & ~np.isnan(tracks[j])
        if np.any(np.abs(tracks[i][both] - tracks[j][both]) < min_sep_hz):
            return False
    return True


def three_component_signal(seed: int, fs_hz: float = 32000.0,
                           duration_ms: float = 32.0, edge_ms: float = 0.5,
                           min_sep_hz: float = 500.0,
                           lattice_times_s: np.ndarray | None = None,
                           lattice_freqs_hz: np.ndarray | None = None,
                           max_tries: int = 4096) -> GroundTruth:
    """Ground-truth signal: 1/t sweep, 5 kHz wobble, constant 3141 Hz tone.

    Candidate seeds ``seed, seed+1, ...`` are scanned deterministically until
    the realization satisfies positivity of all IF and amplitude tracks and
    the minimum frequency separation between the component pairs that do not
    cross by construction. Amplitude supports get raised-cosine onsets and
    offsets of ``edge_ms`` to avoid spectral splatter.
    """
    n = int(round(duration_ms * 1e-3 * fs_hz))
    for attempt in range(max_tries):
        candidate = seed + attempt
        t_ms, specs = _build_components(candidate, fs_hz, duration_ms, edge_ms)
        if _components_valid(specs, n, min_sep_hz):
            break
    else:
        raise RuntimeError("no valid component realization found")

    total = np.zeros(n, dtype=np.complex128)
    for spec in specs:
        total[spec.sample_indices] += spec.complex_samples()
    sig = Signal(samples=total.real.astype(np.complex128), sample_rate_hz=fs_hz,
                 t0_s=0.0, real_valued=True)

    if lattice_times_s is None:
        lattice_times_s = np.arange(0, n, 8) / fs_hz
    if lattice_freqs_hz is None:
        lattice_freqs_hz = np.arange(513) * fs_hz / 1024
    itfr = ideal_tfr(specs, lattice_times_s, lattice_freqs_hz, fs_hz)
    return GroundTruth(
        signal=sig, components=specs, itfr=itfr, seed=candidate, master_seed=seed,
        meta={"edge_ms": edge_ms, "min_sep_hz": min_sep_hz, "tries": attempt + 1},
    )


def ideal_tfr(components: list[ComponentSpec], times_s: np.ndarray,
              freqs_hz: np.ndarray, fs_hz: float,
              squared_weights: bool = False) -> TimeFrequencyGrid:
    """Ideal representation: per slice, each active component deposits its
    amplitude (optionally squared) in the bin nearest its instantaneous
    frequency."""
    times_s = np.asarray(times_s, dtype=float)
    freqs_hz = np.asarray(freqs_hz, dtype=float)
    d_nu = freqs_hz[1] - freqs_hz[0]
    values = np.zeros((times_s.size, freqs_hz.size))
    t_ms = times_s * 1e3
    for spec in components:
        lo, hi = spec.support_ms
        active = np.nonzero((t_ms >= lo) & (t_ms <= hi))[0]
        if active.size == 0:
            continue
        comp_t = spec.sample_indices / fs_hz
        f_here = np.interp(times_s[active], comp_t, spec.if_hz)
        a_here = np.interp(times_s[active], comp_t, spec.amplitude)
        if np.any(f_here < freqs_hz[0]) or np.any(f_here > freqs_hz[-1]):
            raise ValueError("component IF outside the lattice")
        bins = np.round((f_here - freqs_hz[0]) / d_nu).astype(int)
        weights = a_here**2 if squared_weights else a_here
        np.add.at(values, (active, bins), weights)
    return TimeFrequencyGrid(times_s=times_s, freqs_hz=freqs_hz, values=values,
                             kind=POWER, meta={"transform": "ideal"})
