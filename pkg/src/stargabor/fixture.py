"""Synthetic speech-like test signal.

Voiced "syllables" are harmonic chirps with a 1/k^1.3 spectral rolloff
and raised-cosine onsets, separated by hard-zero gaps, which is roughly
the structure that makes real speech compressible in time-frequency.
Deterministic for a given (L, sample_rate, seed).
"""

from __future__ import annotations

import numpy as np


def speech_fixture(L: int, sample_rate: int = 16000, seed: int = 0) -> np.ndarray:
    """Length-L pseudo-speech at the given rate, peak-normalized to 0.03.

    The low peak level puts the default noise sweep (sigma from 0.001 to
    0.01) in a realistic regime: at the top of the sweep the noise
    amplitude rivals the speech peaks.
    """
    rng = np.random.default_rng(seed)
    x = np.zeros(L, dtype=np.float64)
    edge = max(4, int(0.011 * sample_rate))
    min_len = max(2 * edge + 8, sample_rate // 50)
    pos = 0
    while True:
        gap = int(sample_rate * rng.uniform(0.04, 0.08))
        gap = min(gap, max(L // 8, 1))
        pos += gap
        if pos + min_len >= L:
            break
        n = min(int(sample_rate * rng.uniform(0.12, 0.20)), L - pos)
        if n < min_len:
            break
        t = np.arange(n) / sample_rate
        T = n / sample_rate
        f0 = rng.uniform(110.0, 180.0)
        f1 = rng.uniform(140.0, 240.0)
        phase = 2 * np.pi * (f0 * t + 0.5 * (f1 - f0) * t ** 2 / T)
        fmax = max(f0, f1)
        n_harm = max(1, int(0.45 * sample_rate / fmax))
        seg = np.zeros(n)
        for k in range(1, n_harm + 1):
            seg += k ** -1.3 * np.sin(k * phase + rng.uniform(0, 2 * np.pi))
        ramp = 0.5 - 0.5 * np.cos(np.pi * np.arange(edge) / edge)
        seg[:edge] *= ramp
        seg[-edge:] *= ramp[::-1]
        x[pos:pos + n] = seg
        pos += n
    peak = np.abs(x).max()
    if peak == 0.0:
        raise ValueError(
            f"L={L} at {sample_rate} Hz is too short for even one syllable")
    return x * (0.03 / peak)
