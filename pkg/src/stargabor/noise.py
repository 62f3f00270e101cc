"""Seeded noise generators with controlled spectral slope.

White noise is drawn directly; colored noise is white noise reshaped in
the half-spectrum by sqrt(1/f) or sqrt(f), de-meaned, and renormalized
to unit sample standard deviation before scaling.  Because the draw is
always taken at unit scale and sigma multiplies afterwards, doubling
sigma doubles the exact same sample path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RNG_NAME = "numpy PCG64 (default_rng)"

NOISE_KINDS = ("gaussian", "pink", "blue")

# stable small integers used when a seed is derived from (kind, index)
KIND_CODES = {"gaussian": 0, "pink": 1, "blue": 2}


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    sigma: float
    seed: int

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ValueError(f"unknown noise kind {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")

    def generate(self, L: int) -> np.ndarray:
        return gen_noise(L, self.kind, self.sigma, self.seed)


def gen_noise(L: int, kind: str, sigma: float, seed: int) -> np.ndarray:
    """Length-L noise of the given kind and scale, reproducible by seed.

    gaussian  iid N(0, sigma^2) samples
    pink      power ~ 1/f: -10 dB per decade of frequency
    blue      power ~ f:   +10 dB per decade of frequency

    Colored kinds have exactly zero mean and ||e||_2 = sigma * sqrt(L).
    """
    if kind not in NOISE_KINDS:
        raise ValueError(f"unknown noise kind {kind!r}")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if L < 1:
        raise ValueError("L must be positive")
    rng = np.random.default_rng(seed)
    white = rng.standard_normal(L)
    if kind == "gaussian":
        return white * sigma
    if L < 4:
        raise ValueError("colored noise needs L >= 4")
    spec = np.fft.rfft(white)
    spec[0] = 0.0  # no DC
    k = np.arange(1, spec.shape[0], dtype=float)
    if kind == "pink":
        spec[1:] /= np.sqrt(k)
    else:
        spec[1:] *= np.sqrt(k)
    e = np.fft.irfft(spec, n=L)
    e -= e.mean()
    sd = e.std()
    if sd == 0.0:
        raise ValueError("degenerate colored draw")
    return e / sd * sigma


def sigma_sweep() -> np.ndarray:
    """The standard 100-point noise-level grid."""
    return np.linspace(0.001, 0.01, 100)


def spectral_slope_db_per_decade(e: np.ndarray, lo_frac: float = 1 / 256,
                                 hi_frac: float = 1 / 4) -> float:
    """Least-squares slope of the periodogram in dB per decade.

    Fit runs over bins [L*lo_frac, L*hi_frac], away from both the zeroed
    DC end and the Nyquist edge.
    """
    e = np.asarray(e, dtype=float)
    L = e.shape[0]
    p = np.abs(np.fft.rfft(e)) ** 2
    lo = max(1, int(L * lo_frac))
    hi = max(lo + 2, int(L * hi_frac))
    k = np.arange(lo, hi + 1)
    y = 10.0 * np.log10(np.maximum(p[lo:hi + 1], 1e-300))
    return float(np.polyfit(np.log10(k), y, 1)[0])
