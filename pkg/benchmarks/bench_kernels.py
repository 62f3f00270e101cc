"""Timing comparison of the compiled fold/spread kernels vs the numpy
fallback, plus the end-to-end transform built on top of each.

Run from a checkout with the extension built:

    python3 benchmarks/bench_kernels.py

Both backends are imported side by side, so one process measures both.
If the compiled extension is unavailable the script still runs and says
so; the fallback is then benchmarked against itself.
"""

from __future__ import annotations

import time

import numpy as np

from stargabor import _kernels
from stargabor._kernels import _fallback
from stargabor.gabor import GaborLattice, dgt, idgt

try:
    from stargabor._kernels import _core
except ImportError:
    _core = None

CASES = [
    (4095, 21, 13),
    (4095, 3, 13),
    (33915, 21, 21),
    (33915, 5, 17),
]

REPS = 5


def median_time(fn, reps=REPS):
    best = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best.append(time.perf_counter() - t0)
    return float(np.median(best))


def bench_kernels():
    print(f"live backend: {_kernels.BACKEND}")
    if _core is None:
        print("compiled extension not importable; timing fallback only\n")
    rng = np.random.default_rng(0)
    rows = []
    for (L, a, b) in CASES:
        lat = GaborLattice(L, a, b)
        M = lat.M
        x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        g = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        g /= np.linalg.norm(g)
        gbar = np.conj(g)
        A = rng.standard_normal((M, lat.N)) + 1j * rng.standard_normal((M, lat.N))

        t_fold_py = median_time(lambda: _fallback.wfold(x, gbar, a, M))
        t_spread_py = median_time(lambda: _fallback.wspread(A, g, a))
        if _core is not None:
            t_fold_c = median_time(lambda: _core.wfold(x, gbar, a, M))
            t_spread_c = median_time(lambda: _core.wspread(A, g, a))
            dev = max(
                float(np.abs(_core.wfold(x, gbar, a, M)
                             - _fallback.wfold(x, gbar, a, M)).max()),
                float(np.abs(_core.wspread(A, g, a)
                             - _fallback.wspread(A, g, a)).max()),
            )
        else:
            t_fold_c, t_spread_c, dev = t_fold_py, t_spread_py, 0.0
        rows.append((f"({L},{a},{b})", "wfold", t_fold_py, t_fold_c, dev))
        rows.append((f"({L},{a},{b})", "wspread", t_spread_py, t_spread_c, dev))

    print(f"{'case':>16} {'kernel':>8} {'numpy':>10} {'cython':>10} "
          f"{'speedup':>8} {'max dev':>9}")
    for case, kern, tp, tc, dev in rows:
        print(f"{case:>16} {kern:>8} {tp * 1e3:9.2f}ms {tc * 1e3:9.2f}ms "
              f"{tp / tc:7.2f}x {dev:9.2e}")


def bench_transform():
    """End-to-end analysis/synthesis with each backend swapped in."""
    rng = np.random.default_rng(1)
    print(f"\n{'case':>16} {'path':>12} {'numpy':>10} {'cython':>10} "
          f"{'speedup':>8}")
    for (L, a, b) in CASES:
        lat = GaborLattice(L, a, b)
        x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        g = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        g /= np.linalg.norm(g)
        coef = dgt(x, g, lat)
        times = {}
        for name, impl in (("numpy", _fallback),
                           ("cython", _core if _core is not None else _fallback)):
            saved = _kernels._impl
            _kernels._impl = impl
            try:
                times[name] = (median_time(lambda: dgt(x, g, lat)),
                               median_time(lambda: idgt(coef, g, lat)))
            finally:
                _kernels._impl = saved
        for i, path in enumerate(("dgt", "idgt")):
            tp, tc = times["numpy"][i], times["cython"][i]
            print(f"{f'({L},{a},{b})':>16} {path:>12} {tp * 1e3:9.2f}ms "
                  f"{tc * 1e3:9.2f}ms {tp / tc:7.2f}x")


if __name__ == "__main__":
    bench_kernels()
    bench_transform()
