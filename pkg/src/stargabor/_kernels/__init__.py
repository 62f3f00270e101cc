"""Backend selection for the hot fold/spread loops.

The compiled extension is optional.  When it failed to build, or when
STARGABOR_PURE_PYTHON=1 is set, the numpy fallback takes over with
identical semantics.  `BACKEND` records which one is live.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("STARGABOR_PURE_PYTHON", "").strip() not in ("", "0"):
    _impl = _fallback
    BACKEND = "numpy"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "numpy"


def wfold(x, gbar, a, M):
    """(N, M) fold grid: out[n, r] = sum_q x[r+qM] * gbar[(r+qM-na) mod L]."""
    x = np.ascontiguousarray(x, dtype=np.complex128)
    gbar = np.ascontiguousarray(gbar, dtype=np.complex128)
    return _impl.wfold(x, gbar, int(a), int(M))


def wspread(A, g, a):
    """Adjoint spread: x[l] = sum_n g[(l-na) mod L] * A[l mod M, n]."""
    A = np.ascontiguousarray(A, dtype=np.complex128)
    g = np.ascontiguousarray(g, dtype=np.complex128)
    return _impl.wspread(A, g, int(a))
