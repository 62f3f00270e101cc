"""Pure numpy versions of the fold/spread kernels.

Semantics must match the compiled extension exactly; the test suite
diffs the two backends on random inputs.
"""

import numpy as np


def wfold(x, gbar, a, M):
    """Windowed fold of x against gbar over the time lattice.

    out[n, r] = sum_q x[r + qM] * gbar[(r + qM - n*a) mod L]
    """
    L = x.shape[0]
    N = L // a
    b = L // M
    out = np.empty((N, M), dtype=np.complex128)
    for n in range(N):
        # roll puts gbar[(l - n*a) mod L] at position l
        prod = x * np.roll(gbar, n * a)
        out[n] = prod.reshape(b, M).sum(axis=0)
    return out


def wspread(A, g, a):
    """Adjoint of the fold: spread grid columns back along the signal.

    x[l] = sum_n g[(l - n*a) mod L] * A[l mod M, n]
    """
    M, N = A.shape
    L = g.shape[0]
    b = L // M
    acc = np.zeros((b, M), dtype=np.complex128)
    for n in range(N):
        gs = np.roll(g, n * a)
        acc += gs.reshape(b, M) * A[:, n]
    return acc.reshape(L)
