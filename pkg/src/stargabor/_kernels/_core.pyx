# Compiled fold/spread kernels. Semantics mirror _fallback.py.

import numpy as np


def wfold(double complex[::1] x, double complex[::1] gbar,
          Py_ssize_t a, Py_ssize_t M):
    cdef Py_ssize_t L = x.shape[0]
    cdef Py_ssize_t N = L // a
    cdef Py_ssize_t b = L // M
    out = np.zeros((N, M), dtype=np.complex128)
    cdef double complex[:, ::1] o = out
    cdef Py_ssize_t n, q, r, off, idx, base
    for n in range(N):
        for q in range(b):
            base = q * M
            off = base - n * a
            if off < 0:
                off += L
            # off in [0, L); off + r stays below 2L
            for r in range(M):
                idx = off + r
                if idx >= L:
                    idx -= L
                o[n, r] = o[n, r] + x[base + r] * gbar[idx]
    return out


def wspread(double complex[:, ::1] A, double complex[::1] g, Py_ssize_t a):
    cdef Py_ssize_t M = A.shape[0]
    cdef Py_ssize_t N = A.shape[1]
    cdef Py_ssize_t L = g.shape[0]
    out = np.empty(L, dtype=np.complex128)
    cdef double complex[::1] o = out
    cdef Py_ssize_t l, n, idx, r
    cdef double complex s
    for l in range(L):
        r = l % M
        idx = l
        s = 0
        for n in range(N):
            s = s + g[idx] * A[r, n]
            idx -= a
            if idx < 0:
                idx += L
        o[l] = s
    return out
