"""File formats: signal/grid CSV, key-value manifests, PGM heatmaps.

All writers are deterministic (no timestamps, sorted keys, fixed float
formatting) so identical inputs produce byte-identical files.
"""

from __future__ import annotations

import math
from pathlib import Path

import numpy as np

from .signal import COMPLEX, POWER, REAL_SIGNED, Signal, TimeFrequencyGrid

PGM_FLOOR_DB = -80.0


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_signal_csv(signal: Signal, path) -> None:
    """Waveform as ``time_s,real,imag`` plus a ``.meta`` key-value sidecar."""
    path = Path(path)
    times = signal.times_s
    with path.open("w") as fh:
        fh.write("time_s,real,imag\n")
        for t, z in zip(times, signal.samples):
            fh.write(f"{_fmt(float(t))},{_fmt(float(z.real))},{_fmt(float(z.imag))}\n")
    write_manifest(path.with_suffix(path.suffix + ".meta"), {
        "sample_rate_hz": signal.sample_rate_hz,
        "t0_s": signal.t0_s,
        "n_samples": signal.n_samples,
        "real_valued": signal.real_valued,
    })


def read_signal_csv(path) -> Signal:
    """Read a waveform CSV; the sidecar overrides inferred rate and origin."""
    path = Path(path)
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    times, re, im = data[:, 0], data[:, 1], data[:, 2]
    meta_path = path.with_suffix(path.suffix + ".meta")
    if meta_path.exists():
        meta = read_manifest(meta_path)
        fs = float(meta["sample_rate_hz"])
        t0 = float(meta["t0_s"])
        real_valued = str(meta.get("real_valued", "False")) == "True"
    else:
        fs = 1.0 / float(np.median(np.diff(times)))
        t0 = float(times[0])
        real_valued = bool(np.all(im == 0))
    return Signal(samples=re + 1j * im, sample_rate_hz=fs, t0_s=t0,
                  real_valued=real_valued)


def write_grid_csv(grid: TimeFrequencyGrid, path) -> None:
    """Long-form grid CSV: one row per (time, frequency) cell.

    Power and signed-real grids use a single ``value`` column; complex grids
    carry ``re`` and ``im`` columns.
    """
    path = Path(path)
    complex_grid = grid.kind == COMPLEX
    with path.open("w") as fh:
        fh.write("time_s,freq_hz,re,im\n" if complex_grid else "time_s,freq_hz,value\n")
        for i, t in enumerate(grid.times_s):
            for j, f in enumerate(grid.freqs_hz):
                v = grid.values[i, j]
                if complex_grid:
                    fh.write(f"{_fmt(float(t))},{_fmt(float(f))},"
                             f"{_fmt(float(v.real))},{_fmt(float(v.imag))}\n")
                else:
                    fh.write(f"{_fmt(float(t))},{_fmt(float(f))},{_fmt(float(v))}\n")


def write_grid_pgm(grid: TimeFrequencyGrid, path) -> None:
    """8-bit binary PGM heatmap, frequency descending by row, time by column.

    Values are log compressed relative to the grid maximum with a floor at
    -80 dB; negative bilinear values are clipped for display only.
    """
    if grid.kind == COMPLEX:
        power = np.abs(grid.values) ** 2
    elif grid.kind == REAL_SIGNED:
        power = np.clip(grid.values, 0.0, None)
    else:
        power = grid.values
    peak = power.max()
    if peak <= 0:
        pixels = np.zeros(power.shape, dtype=np.uint8)
    else:
        with np.errstate(divide="ignore"):
            db = 10.0 * np.log10(power / peak)
        db = np.clip(db, PGM_FLOOR_DB, 0.0)
        pixels = np.round((db - PGM_FLOOR_DB) / (-PGM_FLOOR_DB) * 255).astype(np.uint8)
    image = pixels.T[::-1]  # rows: frequency descending; columns: time
    with Path(path).open("wb") as fh:
        fh.write(f"P5\n{image.shape[1]} {image.shape[0]}\n255\n".encode())
        fh.write(image.tobytes())


def _flatten(prefix: str, value, out: dict) -> None:
    if isinstance(value, dict):
        for k in sorted(value):
            _flatten(f"{prefix}.{k}" if prefix else str(k), value[k], out)
    elif isinstance(value, (list, tuple, np.ndarray)):
        seq = list(np.asarray(value).ravel()) if isinstance(value, np.ndarray) else value
        out[prefix] = "[" + ", ".join(_fmt(_plain(v)) for v in seq) + "]"
    else:
        out[prefix] = _fmt(_plain(value))


def _plain(v):
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def write_manifest(path, entries: dict) -> None:
    """Plain-text ``key = value`` manifest with sorted, dot-flattened keys."""
    flat: dict = {}
    _flatten("", entries, flat)
    with Path(path).open("w") as fh:
        for key in sorted(flat):
            fh.write(f"{key} = {flat[key]}\n")


def read_manifest(path) -> dict:
    out = {}
    for line in Path(path).read_text().splitlines():
        if not line.strip() or "=" not in line:
            continue
        key, _, value = line.partition("=")
        out[key.strip()] = value.strip()
    return out


def benchmark_table_csv(report, path) -> None:
    """Summary table: one row per SNR, one ``mean (std)`` cell per method."""
    with Path(path).open("w") as fh:
        fh.write("snr_db," + ",".join(report.methods) + "\n")
        for si, snr in enumerate(report.snr_db):
            cells = [f"{report.mean_otd[si, mi]:.2f} ({report.std_otd[si, mi]:.2f})"
                     for mi in range(len(report.methods))]
            fh.write(f"{_fmt(float(snr))}," + ",".join(cells) + "\n")


def benchmark_scores_csv(report, path) -> None:
    """Long-form per-realization scores."""
    with Path(path).open("w") as fh:
        fh.write("snr_db,method,realization,otd\n")
        for si, snr in enumerate(report.snr_db):
            for mi, method in enumerate(report.methods):
                for ri in range(report.n_realizations):
                    fh.write(f"{_fmt(float(snr))},{method},{ri},"
                             f"{_fmt(float(report.scores[si, mi, ri]))}\n")
