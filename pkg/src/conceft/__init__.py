"""Multi-taper synchrosqueezing (ConceFT) time-frequency analysis toolkit.

Synthesis of OAE-like test signals, linear/bilinear/reassigned time-frequency
transforms, and an optimal-transport evaluation harness for comparing them.
"""

from .bilinear import CohenConfig, cwd, spwv, wigner_ville
from .components import (BrownianEnvelope, ComponentSpec, GroundTruth,
                         brownian_envelope, ideal_tfr, three_component_signal)
from .oae import (CochlearMap, IrregularityProfile, ReflectanceSpectrum,
                  band_omegas, correlated_irregularity, expected_group_delay,
                  expected_if, impulse_response, reflectance,
                  reflectance_wavenumber, tboae_approx, two_tone_burst_experiment,
                  white_irregularity)
from .signal import (NoiseRealization, Signal, TimeFrequencyGrid, add_noise,
                     add_noise_sigma, measure_snr, to_power)
from .sst import (ReassignmentField, SstConfig, conceft, multitaper_sst,
                  reassign, reassign_first, reassign_second, sst, synchrosqueeze)
from .stft import Lattice, StftFamily, scalogram, stft, stft_family
from .transport import (BenchmarkConfig, BenchmarkReport, SliceMeasure,
                        mean_otd, normalize_slice, otd, rebin_to_axis,
                        run_benchmark)
from .windows import (SphereSample, WindowFamily, combine, gaussian_window,
                      hermite_windows, sample_sphere)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkConfig", "BenchmarkReport", "BrownianEnvelope", "CochlearMap",
    "CohenConfig", "ComponentSpec", "GroundTruth", "IrregularityProfile",
    "Lattice", "NoiseRealization", "ReassignmentField", "ReflectanceSpectrum",
    "Signal", "SliceMeasure", "SphereSample", "SstConfig", "StftFamily",
    "TimeFrequencyGrid", "WindowFamily", "add_noise", "add_noise_sigma",
    "band_omegas", "brownian_envelope", "combine", "conceft",
    "correlated_irregularity", "cwd", "expected_group_delay", "expected_if",
    "gaussian_window", "hermite_windows", "ideal_tfr", "impulse_response",
    "mean_otd", "measure_snr", "multitaper_sst", "normalize_slice", "otd",
    "reassign", "reassign_first", "reassign_second", "rebin_to_axis",
    "reflectance", "reflectance_wavenumber", "run_benchmark", "sample_sphere",
    "scalogram", "spwv", "sst", "stft", "stft_family", "synchrosqueeze",
    "tboae_approx", "three_component_signal", "to_power",
    "two_tone_burst_experiment", "white_irregularity", "wigner_ville",
]
