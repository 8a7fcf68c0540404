"""Command-line surface: synthesis, analysis, and benchmarking with manifests.

Exit codes: 0 on success, 2 on usage errors (argparse default), 1 on runtime
errors. Diagnostics go to stderr; stdout carries a single summary line. Every
command writes a manifest sufficient to replay it, and identical invocations
produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import io
from .bilinear import CohenConfig, cwd, spwv, wigner_ville
from .oae import (CochlearMap, band_omegas, correlated_irregularity,
                  impulse_response, reflectance, white_irregularity)
from .signal import Signal, add_noise, add_noise_sigma, to_power
from .sst import SstConfig, conceft, multitaper_sst, sst
from .stft import Lattice, scalogram, stft
from .transport import (BENCHMARK_METHODS, BenchmarkConfig, canonical_method,
                        run_benchmark)
from .windows import gaussian_window, hermite_windows

OUTDIR_ENV = "CONCEFT_OUTDIR"

ANALYZE_METHODS = ("stft", "scalogram", "wv", "spwv", "cwd",
                   "sst1", "sst2", "mt", "conceft")


def _out_dir(args) -> Path:
    out = Path(args.out_dir or os.environ.get(OUTDIR_ENV, "."))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _odd_window_length(sigma_s: float, fs: float, span_sigmas: float = 6.0) -> int:
    length = int(math.ceil(2 * span_sigmas * sigma_s * fs))
    return length + 1 if length % 2 == 0 else length


def cmd_synth_oae(args) -> int:
    out = _out_dir(args)
    l_m = args.l_cm * 1e-2
    cmap = CochlearMap(l_m=l_m, lambda_m=l_m / args.lambda_ratio,
                       delta_x_m=args.delta_x_ratio * l_m / args.lambda_ratio)
    if args.corr_d_mm > 0:
        profile = correlated_irregularity(args.sigma_eps, args.corr_d_mm * 1e-3,
                                          seed=args.seed)
    else:
        profile = white_irregularity(args.sigma_eps, seed=args.seed)
    omegas = band_omegas(args.fs, args.n_fft, tuple(args.band))
    spectrum = reflectance(profile, cmap, omegas)
    r = impulse_response(spectrum, args.n_fft, args.fs, tuple(args.band))
    emission = Signal(r.samples.real.astype(complex), args.fs, real_valued=True)

    noise_info: dict = {"mode": "clean"}
    if args.noise_snr is not None:
        emission, real = add_noise(emission, args.noise_snr, seed=args.seed + 1)
        noise_info = {"mode": "snr", "snr_db": args.noise_snr, "seed": real.seed,
                      "sigma": real.sigma}
    elif args.noise_sigma is not None:
        emission, real = add_noise_sigma(emission, args.noise_sigma, seed=args.seed + 1)
        noise_info = {"mode": "sigma", "sigma": real.sigma, "seed": real.seed}

    io.write_signal_csv(emission, out / "emission.csv")
    with (out / "irregularity.csv").open("w") as fh:
        fh.write("x_m,eps\n")
        for x, e in zip(profile.x_m, profile.eps):
            fh.write(f"{io._fmt(float(x))},{io._fmt(float(e))}\n")
    io.write_manifest(out / "synth_manifest.txt", {
        "command": "synth-oae",
        "seed": args.seed,
        "sigma_eps": args.sigma_eps,
        "corr_d_mm": args.corr_d_mm,
        "map": {"l_m": cmap.l_m, "lambda_m": cmap.lambda_m,
                "delta_x_m": cmap.delta_x_m, "omega0_rad_s": cmap.omega0_rad_s},
        "fs_hz": args.fs,
        "n_fft": args.n_fft,
        "band_hz": list(args.band),
        "noise": noise_info,
    })
    print(f"synth-oae: wrote emission.csv, irregularity.csv, synth_manifest.txt "
          f"to {out}")
    return 0


def _analyze_grid(args, signal: Signal):
    fs = signal.sample_rate_hz
    sigma_s = args.window_sigma_ms * 1e-3
    lattice = Lattice(hop_samples=args.hop, n_fft=args.n_fft)
    length = _odd_window_length(sigma_s, fs)
    method = args.method
    if method == "stft":
        return to_power(stft(signal, gaussian_window(sigma_s, length, fs), lattice))
    if method == "scalogram":
        return scalogram(signal, args.scalogram_voices,
                         (args.scalogram_fmin, min(args.scalogram_fmax, fs / 2)),
                         hop_samples=args.hop)
    if method == "wv":
        return wigner_ville(signal, lattice)
    if method in ("spwv", "cwd"):
        config = CohenConfig.from_time_window(length, args.cwd_sigma)
        return (spwv if method == "spwv" else cwd)(signal, config, lattice)
    cfg = SstConfig(gamma_rel=args.gamma_rel,
                    order="first" if method == "sst1" else "second")
    if method in ("sst1", "sst2"):
        return to_power(sst(signal, gaussian_window(sigma_s, length, fs), lattice=lattice,
                            cfg=cfg))
    family = hermite_windows(args.J, sigma_s, length, fs)
    if method == "mt":
        return to_power(multitaper_sst(signal, family, cfg, lattice))
    if method == "conceft":
        return conceft(signal, family, args.N, args.seed, cfg, lattice)
    raise ValueError(f"unknown method {method!r}")


def cmd_analyze(args) -> int:
    out = _out_dir(args)
    signal = io.read_signal_csv(args.input)
    grid = _analyze_grid(args, signal)
    stem = f"analysis_{args.method}"
    io.write_grid_csv(grid, out / f"{stem}.csv")
    io.write_grid_pgm(grid, out / f"{stem}.pgm")
    io.write_manifest(out / f"{stem}_manifest.txt", {
        "command": "analyze",
        "input": str(args.input),
        "method": args.method,
        "window_sigma_ms": args.window_sigma_ms,
        "hop": args.hop,
        "n_fft": args.n_fft,
        "J": args.J,
        "N": args.N,
        "gamma_rel": args.gamma_rel,
        "seed": args.seed,
        "n_times": grid.n_times,
        "n_freqs": grid.n_freqs,
    })
    print(f"analyze: wrote {stem}.csv, {stem}.pgm, {stem}_manifest.txt to {out}")
    return 0


def cmd_benchmark(args) -> int:
    out = _out_dir(args)
    methods = [canonical_method(m) for m in args.methods.split(",")]
    snr_list = [float(s) for s in args.snr.split(",")]
    config = BenchmarkConfig(hop_samples=args.hop, n_fft=args.n_fft,
                             conceft_N=args.conceft_n, gamma_rel=args.gamma_rel)
    report = run_benchmark(methods, snr_list, n_realizations=args.n,
                           master_seed=args.seed, config=config)
    io.benchmark_table_csv(report, out / "benchmark_table.csv")
    io.benchmark_scores_csv(report, out / "benchmark_scores.csv")
    io.write_manifest(out / "benchmark_manifest.txt",
                      {"command": "benchmark", **report.manifest})
    print(f"benchmark: wrote benchmark_table.csv, benchmark_scores.csv, "
          f"benchmark_manifest.txt to {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conceft",
        description="Multi-taper synchrosqueezing analysis of OAE-like signals",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth-oae", help="synthesize a coherent-reflection emission")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sigma-eps", type=float, default=0.01)
    p.add_argument("--corr-d-mm", type=float, default=0.0,
                   help="correlation length in mm; 0 means spatially white")
    p.add_argument("--l-cm", type=float, default=0.72)
    p.add_argument("--lambda-ratio", type=float, default=5.5,
                   help="l / lambda")
    p.add_argument("--delta-x-ratio", type=float, default=0.5,
                   help="delta_x / lambda")
    p.add_argument("--fs", type=float, default=32000.0)
    p.add_argument("--n-fft", type=int, default=4096)
    p.add_argument("--band", type=float, nargs=2, default=[200.0, 16000.0])
    p.add_argument("--noise-snr", type=float, default=None)
    p.add_argument("--noise-sigma", type=float, default=None)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_synth_oae)

    p = sub.add_parser("analyze", help="time-frequency analysis of a signal CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--method", required=True, choices=ANALYZE_METHODS)
    p.add_argument("--window-sigma-ms", type=float, default=5.0 / 12.0)
    p.add_argument("--hop", type=int, default=8)
    p.add_argument("--n-fft", type=int, default=None)
    p.add_argument("--J", type=int, default=2)
    p.add_argument("--N", type=int, default=90)
    p.add_argument("--gamma-rel", type=float, default=1e-4)
    p.add_argument("--cwd-sigma", type=float, default=1.0)
    p.add_argument("--scalogram-voices", type=int, default=32)
    p.add_argument("--scalogram-fmin", type=float, default=200.0)
    p.add_argument("--scalogram-fmax", type=float, default=16000.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("benchmark", help="score methods against the ideal TFR")
    p.add_argument("--snr", default="10,5,2,0")
    p.add_argument("--n", type=int, default=30)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--methods", default=",".join(BENCHMARK_METHODS))
    p.add_argument("--hop", type=int, default=8)
    p.add_argument("--n-fft", type=int, default=1024)
    p.add_argument("--conceft-n", type=int, default=60)
    p.add_argument("--gamma-rel", type=float, default=1e-4)
    p.add_argument("--out-dir", default=None)
    p.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # runtime errors: diagnostics to stderr, exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
