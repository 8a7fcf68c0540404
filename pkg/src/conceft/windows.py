"""Analysis window families and random unit-sphere combinations.

A window family bundles J orthonormal windows with the companion sequences
needed by the reassignment rules: the time derivative (Dh), second derivative
(DDh), time weighting (Th = t*h) and the mixed term (TDh = t*Dh). Companions
are always built analytically and transformed together with the windows, so
every companion remains the exact derivative / time weighting of its window.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class WindowFamily:
    """J windows sampled on a centered time axis, plus companion sequences.

    Rows of each array are windows; orthonormality is with respect to the
    discrete inner product ``sum(a * conj(b)) / sample_rate_hz``.
    """

    length_samples: int
    sample_rate_hz: float
    windows: np.ndarray
    d_windows: np.ndarray
    dd_windows: np.ndarray
    t_windows: np.ndarray
    td_windows: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.length_samples % 2 == 0 or self.length_samples < 3:
            raise ValueError("window length must be odd and >= 3")
        arrays = [self.windows, self.d_windows, self.dd_windows,
                  self.t_windows, self.td_windows]
        shapes = {np.atleast_2d(a).shape for a in arrays}
        if len(shapes) != 1:
            raise ValueError("window and companion arrays must share one shape")
        (self.windows, self.d_windows, self.dd_windows,
         self.t_windows, self.td_windows) = (np.atleast_2d(a) for a in arrays)
        if self.windows.shape[1] != self.length_samples:
            raise ValueError("array columns must equal length_samples")

    @property
    def J(self) -> int:
        return self.windows.shape[0]

    @property
    def times_s(self) -> np.ndarray:
        """Centered time axis, symmetric about the middle sample."""
        half = (self.length_samples - 1) // 2
        return np.arange(-half, half + 1) / self.sample_rate_hz

    def select(self, j: int) -> "WindowFamily":
        """Single-window (J=1) family holding window index ``j`` and companions."""
        sl = slice(j, j + 1)
        return WindowFamily(
            length_samples=self.length_samples,
            sample_rate_hz=self.sample_rate_hz,
            windows=self.windows[sl],
            d_windows=self.d_windows[sl],
            dd_windows=self.dd_windows[sl],
            t_windows=self.t_windows[sl],
            td_windows=self.td_windows[sl],
            meta={**self.meta, "selected": j},
        )

    def gram(self) -> np.ndarray:
        """Gram matrix of the windows under the discrete inner product."""
        dt = 1.0 / self.sample_rate_hz
        return (self.windows @ self.windows.conj().T) * dt


@dataclass
class SphereSample:
    """Point on the complex unit sphere used to mix a window family."""

    coefficients: np.ndarray
    seed: int

    def __post_init__(self):
        self.coefficients = np.asarray(self.coefficients, dtype=np.complex128)
        norm = np.linalg.norm(self.coefficients)
        if abs(norm - 1.0) > 1e-12:
            raise ValueError("coefficients must have unit Euclidean norm")


def _family_from_rows(rows, length, fs, meta):
    h, dh, ddh, th, tdh = rows
    return WindowFamily(
        length_samples=length,
        sample_rate_hz=fs,
        windows=h,
        d_windows=dh,
        dd_windows=ddh,
        t_windows=th,
        td_windows=tdh,
        meta=meta,
    )


def gaussian_window(sigma_s: float, length_samples: int, sample_rate_hz: float) -> WindowFamily:
    """Unit-energy Gaussian window with analytic companion sequences.

    The window must cover at least +-4 sigma, otherwise the truncation would
    leak energy into the derivative identities used downstream.
    """
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    if length_samples % 2 == 0:
        raise ValueError("window length must be odd")
    half_span = (length_samples - 1) / 2 / sample_rate_hz
    if half_span < 4 * sigma_s:
        raise ValueError("window truncation: length does not cover +-4 sigma")
    fam = hermite_windows(1, sigma_s, length_samples, sample_rate_hz)
    fam.meta = {"shape": "gaussian", "sigma_s": sigma_s}
    return fam


def hermite_windows(J: int, sigma_s: float, length_samples: int,
                    sample_rate_hz: float) -> WindowFamily:
    """First J orthonormalized Hermite windows with shared dilation ``sigma_s``.

    Window j is the (j-1)-th Hermite polynomial times a Gaussian, sampled on
    the centered axis and re-orthonormalized by Gram-Schmidt in index order
    (discrete sampling breaks exact continuum orthogonality). The first window
    is the Gaussian. Companions are derived analytically from the closed-form
    derivatives and carried through the orthonormalization by linearity.
    """
    if not 1 <= J <= 6:
        raise ValueError("J must be between 1 and 6")
    if sigma_s <= 0:
        raise ValueError("sigma_s must be positive")
    if length_samples % 2 == 0:
        raise ValueError("window length must be odd")
    half_span = (length_samples - 1) / 2 / sample_rate_hz
    # highest order must keep its classical support plus a 3 sigma guard band
    if half_span < (np.sqrt(2 * J - 1) + 3) * sigma_s:
        raise ValueError("window truncation: length too short for order J")

    half = (length_samples - 1) // 2
    t = np.arange(-half, half + 1) / sample_rate_hz
    u = t / sigma_s
    gauss = np.exp(-0.5 * u**2)

    # physicists' Hermite polynomials H_0..H_{J-1} by recurrence
    H = np.zeros((J + 1, length_samples))
    H[0] = 1.0
    if J >= 2:
        H[1] = 2 * u
    for n in range(1, J):
        H[n + 1] = 2 * u * H[n] - 2 * n * H[n - 1]

    h = np.zeros((J, length_samples))
    dh = np.zeros_like(h)
    ddh = np.zeros_like(h)
    for j in range(J):
        n = j  # polynomial order
        h[j] = H[n] * gauss
        hprime = 2 * n * H[n - 1] * gauss if n >= 1 else np.zeros(length_samples)
        dh[j] = hprime / sigma_s - (t / sigma_s**2) * h[j]
        # from the Hermite ODE: f'' = ((u^2 - 1 - 2n) / sigma^2) f
        ddh[j] = ((u**2 - 1 - 2 * n) / sigma_s**2) * h[j]

    # Gram-Schmidt in index order; identical row operations on companions keep
    # them exact derivatives of the transformed windows.
    dt = 1.0 / sample_rate_hz
    rows = [h, dh, ddh]
    for j in range(J):
        for k in range(j):
            c = np.sum(h[j] * h[k]) * dt
            for arr in rows:
                arr[j] = arr[j] - c * arr[k]
        norm = np.sqrt(np.sum(h[j] ** 2) * dt)
        for arr in rows:
            arr[j] = arr[j] / norm

    th = t[None, :] * h
    tdh = t[None, :] * dh
    return _family_from_rows(
        (h, dh, ddh, th, tdh), length_samples, sample_rate_hz,
        {"shape": "hermite", "sigma_s": sigma_s, "J": J},
    )


def sample_sphere(J: int, seed: int) -> SphereSample:
    """Uniform sample from the unit sphere in C^J, deterministic given seed."""
    if J < 1:
        raise ValueError("J must be >= 1")
    rng = np.random.default_rng(seed)
    z = rng.standard_normal(2 * J)
    c = z[:J] + 1j * z[J:]
    return SphereSample(coefficients=c / np.linalg.norm(c), seed=seed)


def combine(family: WindowFamily, r: SphereSample) -> WindowFamily:
    """Mix a family into one complex window: ``h = sum_j conj(r_j) h_j``.

    The same combination is applied to all companions, so the combined
    companions are exact derivatives / time weightings of the combined window.
    Orthonormality of the family makes the result unit norm.
    """
    if r.coefficients.size != family.J:
        raise ValueError("sphere sample dimension must equal family J")
    w = r.coefficients.conj()
    rows = tuple(
        (w @ arr)[None, :]
        for arr in (family.windows, family.d_windows, family.dd_windows,
                    family.t_windows, family.td_windows)
    )
    return _family_from_rows(
        rows, family.length_samples, family.sample_rate_hz,
        {**family.meta, "combined_seed": r.seed},
    )
