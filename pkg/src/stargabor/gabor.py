"""Finite Gabor systems on Z_L: transforms, frame bounds, spark.

The lattice is separable with time step a and frequency step b, both
dividing L, giving M = L/b frequency channels and N = L/a time shifts.
Everything is cyclic; translations wrap mod L.  The fast transform path
factors the analysis sum into a windowed fold followed by length-M FFTs,
and the synthesis adjoint into the mirrored spread, so the two are exact
adjoints of each other and not just approximate inverses.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
import hashlib

import numpy as np
from scipy.sparse.linalg import LinearOperator, eigsh

from . import _kernels
from .errors import (
    AdjointMismatch,
    DimensionMismatch,
    InvalidLattice,
    ModeMismatch,
    NonRealInput,
    TooLarge,
)
from .ringmod import AdmissibilityMode
from .zauner import star_window


@dataclass(frozen=True)
class GaborLattice:
    """Separable sampling lattice for a length-L signal."""

    L: int
    a: int
    b: int

    def __post_init__(self):
        if self.L < 2 or self.a < 1 or self.b < 1:
            raise InvalidLattice(f"bad lattice ({self.L}, {self.a}, {self.b})")
        if self.L % self.a != 0:
            raise InvalidLattice(f"a={self.a} does not divide L={self.L}")
        if self.L % self.b != 0:
            raise InvalidLattice(f"b={self.b} does not divide L={self.L}")
        if self.a * self.b >= self.L:
            # at critical density or below, analysis cannot be injective
            # enough for the sparse model; require oversampling
            raise InvalidLattice(
                f"a*b = {self.a * self.b} must be < L = {self.L}")

    @property
    def M(self) -> int:
        """Frequency channels."""
        return self.L // self.b

    @property
    def N(self) -> int:
        """Time shifts."""
        return self.L // self.a

    @property
    def P(self) -> int:
        """Total atoms."""
        return self.M * self.N

    @property
    def redundancy(self) -> float:
        return self.L / (self.a * self.b)

    @property
    def real_rows(self) -> int:
        """Rows kept by the nonnegative-frequency transform."""
        return self.M // 2 + 1


@dataclass
class Window:
    """Unit-norm analysis window with its construction recipe."""

    values: np.ndarray
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 1:
            raise DimensionMismatch("window must be a vector")
        n = np.linalg.norm(self.values)
        if abs(n - 1.0) > 1e-8:
            raise ValueError(f"window must be unit norm, got {n!r}")

    @property
    def L(self) -> int:
        return self.values.shape[0]


WINDOW_KINDS = ("gauss", "hann", "hamming", "random", "star")


def make_window(kind: str, L: int, seed: int = 0, theta: float = 0.0,
                cache_dir: str | None = None,
                mode: AdmissibilityMode = AdmissibilityMode.RELAXED) -> Window:
    """Build one of the named unit-norm windows of length L.

    gauss    exp(-pi d(l)^2 / L) with the wrapped distance d(l)
    hann     0.5 - 0.5 cos(2 pi l / L)
    hamming  0.54 - 0.46 cos(2 pi l / L)
    random   seeded complex Gaussian entries
    star     order-three eigenvector (admissible L only)
    """
    params = {}
    if kind == "gauss":
        d = np.minimum(np.arange(L), L - np.arange(L))
        g = np.exp(-np.pi * d.astype(float) ** 2 / L)
    elif kind == "hann":
        g = 0.5 - 0.5 * np.cos(2 * np.pi * np.arange(L) / L)
    elif kind == "hamming":
        g = 0.54 - 0.46 * np.cos(2 * np.pi * np.arange(L) / L)
    elif kind == "random":
        rng = np.random.default_rng(seed)
        g = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        params["seed"] = seed
    elif kind == "star":
        res = star_window(L, theta=theta, seed=seed, mode=mode,
                          cache_dir=cache_dir)
        g = res.vector
        params = {"seed": seed, "theta": theta,
                  "eigenvalue": res.eigenvalue, "residual": res.residual,
                  "root_index": res.root_index}
    else:
        raise ValueError(f"unknown window kind {kind!r}")
    g = np.asarray(g, dtype=np.complex128)
    return Window(g / np.linalg.norm(g), kind, params)


@dataclass
class GaborCoefficients:
    """Coefficient grid with shape (M, N), or (M//2+1, N) in real mode."""

    grid: np.ndarray
    lattice: GaborLattice
    real_mode: bool = False

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=np.complex128)
        rows = self.lattice.real_rows if self.real_mode else self.lattice.M
        if self.grid.shape != (rows, self.lattice.N):
            raise DimensionMismatch(
                f"grid shape {self.grid.shape}, lattice wants "
                f"({rows}, {self.lattice.N})")

    @property
    def flat(self) -> np.ndarray:
        return self.grid.ravel()


def _window_values(window, L):
    if isinstance(window, Window):
        g = window.values
    else:
        g = np.asarray(window, dtype=np.complex128)
    if g.shape != (L,):
        raise DimensionMismatch(f"window length {g.shape} vs L={L}")
    return g


def _check_signal(x, L):
    x = np.asarray(x)
    if x.shape != (L,):
        raise DimensionMismatch(f"signal length {x.shape} vs L={L}")
    return np.ascontiguousarray(x, dtype=np.complex128)


def dgt(x, window, lattice: GaborLattice) -> GaborCoefficients:
    """Analysis coefficients c[m, n] = <x, MF_m T_n g> on the lattice."""
    g = _window_values(window, lattice.L)
    x = _check_signal(x, lattice.L)
    folded = _kernels.wfold(x, np.conj(g), lattice.a, lattice.M)
    grid = np.fft.fft(folded, axis=1).T
    return GaborCoefficients(np.ascontiguousarray(grid), lattice)


def dgt_naive(x, window, lattice: GaborLattice) -> GaborCoefficients:
    """Direct-sum reference transform, quadratic in L. Testing only."""
    g = _window_values(window, lattice.L)
    x = _check_signal(x, lattice.L)
    L, a, b = lattice.L, lattice.a, lattice.b
    grid = np.empty((lattice.M, lattice.N), dtype=np.complex128)
    l = np.arange(L)
    for n in range(lattice.N):
        tg = np.roll(g, n * a)
        for m in range(lattice.M):
            atom = tg * np.exp(2j * np.pi * m * b * l / L)
            grid[m, n] = np.vdot(atom, x)
    return GaborCoefficients(grid, lattice)


def idgt(coef: GaborCoefficients, window, lattice: GaborLattice) -> np.ndarray:
    """Adjoint synthesis x = sum_{m,n} c[m,n] MF_m T_n g."""
    if coef.real_mode:
        raise ModeMismatch("full-mode synthesis on real-mode coefficients")
    if coef.lattice != lattice:
        raise DimensionMismatch("coefficient lattice differs")
    g = _window_values(window, lattice.L)
    A = lattice.M * np.fft.ifft(coef.grid, axis=0)
    return _kernels.wspread(A, g, lattice.a)


def dgt_real(x, window, lattice: GaborLattice) -> GaborCoefficients:
    """Nonnegative-frequency rows of the transform of a real signal.

    Computed as the full transform sliced to rows m = 0 .. M//2, so the
    kept rows agree bit for bit with the full-mode grid.
    """
    x = np.asarray(x)
    if np.iscomplexobj(x) and np.any(x.imag != 0):
        raise NonRealInput("real-mode transform needs a real signal")
    full = dgt(x.real if np.iscomplexobj(x) else x, window, lattice)
    rows = lattice.real_rows
    return GaborCoefficients(np.ascontiguousarray(full.grid[:rows]),
                             lattice, real_mode=True)


def idgt_real(coef: GaborCoefficients, window,
              lattice: GaborLattice) -> np.ndarray:
    """Adjoint of dgt_real: zero-pad the missing rows, synthesize, Re."""
    if not coef.real_mode:
        raise ModeMismatch("real-mode synthesis on full-mode coefficients")
    if coef.lattice != lattice:
        raise DimensionMismatch("coefficient lattice differs")
    full = np.zeros((lattice.M, lattice.N), dtype=np.complex128)
    full[:lattice.real_rows] = coef.grid
    x = idgt(GaborCoefficients(full, lattice), window, lattice)
    return np.ascontiguousarray(x.real)


def gabor_system(window, lattice: GaborLattice) -> np.ndarray:
    """Dense (L, P) matrix whose columns are the lattice atoms.

    Column order matches the raveled coefficient grid, so
    (Phi^H @ x).reshape(M, N) equals dgt(x).grid.
    """
    g = _window_values(window, lattice.L)
    L = lattice.L
    if L * lattice.P > 4_000_000:
        raise TooLarge(f"dense system at L={L} has {L * lattice.P} entries")
    l = np.arange(L)
    Phi = np.empty((L, lattice.P), dtype=np.complex128)
    for m in range(lattice.M):
        mod = np.exp(2j * np.pi * m * lattice.b * l / L)
        for n in range(lattice.N):
            Phi[:, m * lattice.N + n] = mod * np.roll(g, n * lattice.a)
    return Phi


@dataclass(frozen=True)
class FrameBounds:
    lower: float
    upper: float

    @property
    def ratio(self) -> float:
        return self.upper / self.lower

    def is_tight(self, tol: float = 1e-9) -> bool:
        return self.upper - self.lower <= tol * self.upper


def frame_bounds(window, lattice: GaborLattice,
                 dense_limit: int = 1200) -> FrameBounds:
    """Extreme eigenvalues of the frame operator S = Phi Phi^H.

    Dense eigvalsh up to dense_limit; above that a Lanczos solve on the
    matrix-free operator, getting the bottom eigenvalue from the top one
    of (c2 I - S) so both ends converge like dominant eigenvalues.
    """
    L = lattice.L
    g = _window_values(window, lattice.L)

    def apply_s(v):
        c = dgt(v, g, lattice)
        return idgt(c, g, lattice)

    if L <= dense_limit:
        S = np.empty((L, L), dtype=np.complex128)
        e = np.zeros(L, dtype=np.complex128)
        for i in range(L):
            e[i] = 1.0
            S[:, i] = apply_s(e)
            e[i] = 0.0
        vals = np.linalg.eigvalsh(S)
        return FrameBounds(float(vals[0]), float(vals[-1]))

    op = LinearOperator((L, L), matvec=apply_s, dtype=np.complex128)
    c2 = float(eigsh(op, k=1, which="LA",
                     return_eigenvectors=False)[0])
    shifted = LinearOperator(
        (L, L), matvec=lambda v: c2 * v - apply_s(v), dtype=np.complex128)
    gap = float(eigsh(shifted, k=1, which="LA",
                      return_eigenvectors=False)[0])
    return FrameBounds(c2 - gap, c2)


def spark_oracle(window, lattice: GaborLattice, limit: int = 1_000_000,
                 rtol: float = 1e-8) -> int:
    """Exhaustive spark of the dense system: the smallest number of
    linearly dependent atoms.  Returns L + 1 when every L-subset is
    independent (the oversampled system always has dependent sets of
    size L + 1).

    The subset count is checked before each size starts; exceeding
    `limit` raises TooLarge rather than silently truncating the search.
    """
    from itertools import combinations
    from math import comb

    Phi = gabor_system(window, lattice)
    L, P = Phi.shape
    tested = 0
    for s in range(1, L + 1):
        tested += comb(P, s)
        if tested > limit:
            raise TooLarge(
                f"spark search needs {tested} rank tests up to size {s}, "
                f"limit is {limit}")
        for idx in combinations(range(P), s):
            sub = Phi[:, idx]
            sig = np.linalg.svd(sub, compute_uv=False)
            if sig[0] == 0.0 or sig[-1] < rtol * sig[0]:
                return s
    return L + 1


# operator norms for (window, lattice, mode) triples already estimated
# this process; see GaborAnalysisOp.norm_bound
_NORM_BOUND_CACHE: dict = {}

# M * b^2 cap on the block eigenproblem; above it norm_bound falls back
# to power iteration rather than materialize the blocks
_NORM_BLOCK_LIMIT = 50_000_000


def _frame_operator_top(g: np.ndarray, lattice: GaborLattice) -> float:
    """Exact largest eigenvalue of the full-grid frame operator.

    The frame operator only couples samples whose separation is a
    multiple of M, with a-periodic coupling weights, so it splits into
    M Hermitian b x b blocks and the top eigenvalue is exact linear
    algebra instead of an iteration.
    """
    L, a, b, M = lattice.L, lattice.a, lattice.b, lattice.M
    G = np.empty((b, a), dtype=np.complex128)
    for j in range(b):
        h = g * np.conj(np.roll(g, j * M))
        G[j] = h.reshape(L // a, a).sum(axis=0)
    r = np.arange(M)
    k = np.arange(b)
    jdx = np.broadcast_to(((k[:, None] - k[None, :]) % b)[None], (M, b, b))
    tdx = np.broadcast_to((r[:, None, None] + k[None, :, None] * M) % a,
                          (M, b, b))
    blocks = M * G[jdx, tdx]
    return float(np.linalg.eigvalsh(blocks)[:, -1].max())


def _zero_modulation_top(g: np.ndarray, lattice: GaborLattice) -> float:
    """Exact squared norm of the channel x -> <x, T_na g> over n."""
    L, a = lattice.L, lattice.a
    gh = np.abs(np.fft.fft(g)) ** 2
    return float(gh.reshape(a, L // a).sum(axis=0).max() / a)


class GaborAnalysisOp:
    """Flat forward/adjoint pair around the transform, for solvers.

    forward maps a signal to the raveled coefficient grid; adjoint maps
    a grid back.  In real mode the domain is real vectors and only the
    nonnegative-frequency rows are produced.
    """

    def __init__(self, window, lattice: GaborLattice, real_mode: bool = False):
        self.window = window if isinstance(window, Window) else None
        self._g = _window_values(window, lattice.L)
        self.lattice = lattice
        self.real_mode = real_mode
        self.L = lattice.L
        rows = lattice.real_rows if real_mode else lattice.M
        self.coef_shape = (rows, lattice.N)
        self.coef_len = rows * lattice.N
        self._norm_bound = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        if self.real_mode:
            c = dgt_real(x, self._g, self.lattice)
        else:
            c = dgt(x, self._g, self.lattice)
        return c.flat

    def adjoint(self, cflat: np.ndarray) -> np.ndarray:
        cflat = np.asarray(cflat, dtype=np.complex128)
        if cflat.shape != (self.coef_len,):
            raise DimensionMismatch(
                f"coefficient vector {cflat.shape} vs {self.coef_len}")
        coef = GaborCoefficients(cflat.reshape(self.coef_shape),
                                 self.lattice, real_mode=self.real_mode)
        if self.real_mode:
            return idgt_real(coef, self._g, self.lattice)
        return idgt(coef, self._g, self.lattice)

    def adjoint_probe(self, seed: int = 0, rtol: float = 1e-8) -> float:
        """Inner-product identity check; raises AdjointMismatch on failure."""
        rng = np.random.default_rng(seed)
        if self.real_mode:
            x = rng.standard_normal(self.L)
        else:
            x = rng.standard_normal(self.L) + 1j * rng.standard_normal(self.L)
        w = (rng.standard_normal(self.coef_len)
             + 1j * rng.standard_normal(self.coef_len))
        lhs = np.vdot(w, self.forward(x))
        ax = self.adjoint(w)
        if self.real_mode:
            # real domain pairs through Re<.,.>; the imaginary part of
            # lhs has no counterpart on the signal side
            lhs = lhs.real
            rhs = np.dot(ax, x)
        else:
            rhs = np.vdot(ax, x)
        scale = max(abs(lhs), abs(rhs), 1e-300)
        err = abs(lhs - rhs) / scale
        if err > rtol:
            raise AdjointMismatch(
                f"forward/adjoint probe off by {err:.3e} (rtol {rtol})")
        return err

    def norm_bound(self, safety: float = 1.02, iters: int = 50) -> float:
        """Upper bound on the operator norm, cached by content.

        Computed from the exact block eigendecomposition of the frame
        operator, padded by `safety` so downstream step sizes err small.
        In real mode with a real window the dropped rows mirror the kept
        ones on real input, which tightens the full-grid value; for a
        complex window the full grid dominates the kept rows and the
        bound is simply looser.  The cache is keyed on the window samples
        and lattice, so fresh op instances over the same system (one per
        denoising run, say) pay for the computation once.
        """
        if self._norm_bound is not None:
            return self._norm_bound
        lat = self.lattice
        key = (hashlib.sha256(np.ascontiguousarray(self._g)).hexdigest(),
               lat.L, lat.a, lat.b, self.real_mode, safety)
        hit = _NORM_BOUND_CACHE.get(key)
        if hit is not None:
            self._norm_bound = hit
            return hit
        if lat.M * lat.b * lat.b <= _NORM_BLOCK_LIMIT:
            top = _frame_operator_top(self._g, lat)
            if self.real_mode and np.abs(self._g.imag).max() < 1e-14:
                # rows m and M-m see conjugate coefficients on real
                # input, so the kept rows carry (full + unpaired)/2 of
                # the energy; the zero-modulation row is unpaired, and
                # for even M the half-rate row matches its top exactly
                unpaired = 1 if lat.M % 2 else 2
                top = (top + unpaired * _zero_modulation_top(self._g, lat)) / 2
            bound = float(np.sqrt(top)) * safety
        else:
            bound = self._power_norm(safety, iters)
        self._norm_bound = bound
        _NORM_BOUND_CACHE[key] = bound
        return bound

    def _power_norm(self, safety: float, iters: int) -> float:
        rng = np.random.default_rng(0)
        if self.real_mode:
            v = rng.standard_normal(self.L)
        else:
            v = rng.standard_normal(self.L) + 1j * rng.standard_normal(self.L)
        v /= np.linalg.norm(v)
        lam = 0.0
        for _ in range(iters):
            w = self.adjoint(self.forward(v))
            nw = np.linalg.norm(w)
            if nw == 0.0:
                break
            lam_new = nw  # Rayleigh quotient of the PSD normal operator
            v = w / nw
            if abs(lam_new - lam) <= 1e-4 * lam_new:
                lam = lam_new
                break
            lam = lam_new
        return float(np.sqrt(lam) * safety)


def coefficients_to_csv(coef: GaborCoefficients, path: str) -> None:
    """Dump the grid as rows of m, n, re, im."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["m", "n", "re", "im"])
        M, N = coef.grid.shape
        for m in range(M):
            for n in range(N):
                z = coef.grid[m, n]
                w.writerow([m, n, repr(float(z.real)), repr(float(z.imag))])


def _block_maxima(mag: np.ndarray, cap: int) -> np.ndarray:
    """Downsample by taking maxima over near-even blocks along each axis."""
    out = mag
    for axis in range(2):
        n = out.shape[axis]
        if n <= cap:
            continue
        edges = np.linspace(0, n, cap + 1).astype(int)
        pieces = [out.take(range(edges[i], edges[i + 1]), axis=axis)
                  .max(axis=axis, keepdims=True)
                  for i in range(cap)]
        out = np.concatenate(pieces, axis=axis)
    return out


def coefficients_to_svg(coef: GaborCoefficients, path: str,
                        max_cells: int = 128) -> None:
    """Log-magnitude heatmap as a standalone SVG, no plotting deps."""
    mag = np.abs(coef.grid)
    mag = _block_maxima(mag, max_cells)
    top = mag.max()
    floor = top * 1e-5 if top > 0 else 1.0
    z = np.log10(np.maximum(mag, floor) / floor)
    z = z / z.max() if z.max() > 0 else z
    rows, cols = z.shape
    cell = 6
    width, height = cols * cell, rows * cell
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="#000010"/>',
    ]
    for i in range(rows):
        # row 0 is frequency bin 0; draw it at the bottom
        y = (rows - 1 - i) * cell
        for j in range(cols):
            v = z[i, j]
            if v <= 0:
                continue
            r = int(255 * min(1.0, 1.5 * v))
            gch = int(255 * max(0.0, 1.5 * v - 0.5))
            bl = int(80 + 100 * v)
            parts.append(
                f'<rect x="{j * cell}" y="{y}" width="{cell}" '
                f'height="{cell}" fill="rgb({r},{gch},{min(bl, 255)})"/>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts))
