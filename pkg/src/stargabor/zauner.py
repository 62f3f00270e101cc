"""Metaplectic unitaries on Z_L and the order-three eigenvector window.

An SL(2, Z_L) matrix with invertible upper-right entry lifts to an L x L
unitary.  The specific matrix used here has order three, so its unitary
cubes to a global phase and splits C^L into three eigenspaces.  The
"star" window is a unit-norm eigenvector picked from one of them, with a
deterministic probe and a canonical phase so repeated builds agree
bit-for-bit.

Exponent arithmetic lives in Z_{2L}: the generator tau = -exp(i*pi/L)
satisfies tau**(2L) = 1, so every quadratic form below is reduced mod 2L
term by term before anything is multiplied out.  That keeps intermediate
products inside int64 for any L this package will ever see.
"""

from __future__ import annotations

import os
import struct
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    CacheFormatError,
    ConvergenceError,
    NotOrderThree,
    TooLarge,
)
from .ringmod import AdmissibilityMode, Residue, mod_inverse, require_admissible

DENSE_LIMIT = 2048
_DENSE_HARD_CAP = 4096  # 16 * L**2 bytes; above this the builder refuses


@dataclass(frozen=True)
class SymplecticMatrix:
    """2x2 matrix over Z_L with determinant one."""

    alpha: Residue
    beta: Residue
    gamma: Residue
    delta: Residue

    def __post_init__(self):
        mods = {self.alpha.modulus, self.beta.modulus,
                self.gamma.modulus, self.delta.modulus}
        if len(mods) != 1:
            raise ValueError("entries live in different rings")
        det = self.alpha * self.delta - self.beta * self.gamma
        if det.value != 1 % self.L:
            raise ValueError(f"determinant {det.value} != 1 mod {self.L}")

    @property
    def L(self) -> int:
        return self.alpha.modulus

    @property
    def is_identity(self) -> bool:
        return (self.alpha.value == 1 % self.L and self.beta.value == 0
                and self.gamma.value == 0 and self.delta.value == 1 % self.L)

    def __matmul__(self, o: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(
            self.alpha * o.alpha + self.beta * o.gamma,
            self.alpha * o.beta + self.beta * o.delta,
            self.gamma * o.alpha + self.delta * o.gamma,
            self.gamma * o.beta + self.delta * o.delta,
        )

    @classmethod
    def identity(cls, L: int) -> "SymplecticMatrix":
        return cls(Residue(1, L), Residue(0, L), Residue(0, L), Residue(1, L))


def zauner_matrix(L: int) -> SymplecticMatrix:
    """The order-three element (0, -1; 1, -1) of SL(2, Z_L)."""
    return SymplecticMatrix(
        Residue(0, L), Residue(-1, L), Residue(1, L), Residue(-1, L))


@lru_cache(maxsize=8)
def tau_powers(L: int) -> np.ndarray:
    """Table of tau**k for k in [0, 2L), tau = -exp(i*pi/L)."""
    k = np.arange(2 * L)
    sign = 1.0 - 2.0 * (k & 1)
    return sign * np.exp(1j * np.pi * k / L)


def _exponent_block(mat: SymplecticMatrix, u: np.ndarray, v: np.ndarray,
                    binv: int) -> np.ndarray:
    """Quadratic-form exponents binv*(alpha v^2 - 2uv + delta u^2) mod 2L."""
    twoL = 2 * mat.L
    a, d = mat.alpha.value, mat.delta.value
    t = (a * ((v * v) % twoL)) % twoL
    t = t + (d * ((u * u) % twoL)) % twoL
    t = t + (twoL - (2 * u * v) % twoL)
    return (binv * (t % twoL)) % twoL


def weil_unitary(mat: SymplecticMatrix, theta: float = 0.0) -> np.ndarray:
    """Dense L x L unitary lifting `mat`, up to the free phase theta.

    U[u, v] = exp(i*theta)/sqrt(L) * tau**(binv*(alpha v^2 - 2uv + delta u^2))

    where binv is the canonical representative of beta^-1 in [0, L).
    Only valid when gcd(beta, L) = 1; mod_inverse enforces that.
    """
    L = mat.L
    if L > _DENSE_HARD_CAP:
        raise TooLarge(
            f"dense unitary at L={L} needs {16 * L * L / 2**20:.0f} MiB; "
            "use apply_weil instead")
    binv = mod_inverse(mat.beta.value, L)
    u = np.arange(L, dtype=np.int64)[:, None]
    v = np.arange(L, dtype=np.int64)[None, :]
    e = _exponent_block(mat, u, v, binv)
    scale = np.exp(1j * theta) / np.sqrt(L)
    return scale * tau_powers(L)[e]


def apply_weil(mat: SymplecticMatrix, x: np.ndarray, theta: float = 0.0,
               block_rows: int = 256) -> np.ndarray:
    """Matrix-free U @ x, materializing only block_rows rows at a time."""
    L = mat.L
    x = np.asarray(x, dtype=np.complex128)
    if x.shape != (L,):
        raise ValueError(f"expected a length-{L} vector, got {x.shape}")
    binv = mod_inverse(mat.beta.value, L)
    tau = tau_powers(L)
    v = np.arange(L, dtype=np.int64)[None, :]
    y = np.empty(L, dtype=np.complex128)
    for u0 in range(0, L, block_rows):
        u = np.arange(u0, min(u0 + block_rows, L), dtype=np.int64)[:, None]
        e = _exponent_block(mat, u, v, binv)
        y[u0:u0 + e.shape[0]] = tau[e] @ x
    y *= np.exp(1j * theta) / np.sqrt(L)
    return y


@lru_cache(maxsize=8)
def _zauner_chirp(L: int) -> np.ndarray:
    u = np.arange(L, dtype=np.int64)
    return tau_powers(L)[(u * u) % (2 * L)]


def apply_zauner(x: np.ndarray, theta: float = 0.0) -> np.ndarray:
    """Fast U @ x for the order-three matrix at odd L.

    For odd L the quadratic form collapses to u^2 + 2uv mod 2L, so the
    whole unitary is a chirp times an inverse DFT: O(L log L) instead of
    the O(L^2) generic row-block apply.
    """
    x = np.asarray(x, dtype=np.complex128)
    L = x.shape[0]
    if L % 2 == 0:
        raise ValueError("fast path needs odd L")
    y = np.sqrt(L) * _zauner_chirp(L) * np.fft.ifft(x)
    y *= np.exp(1j * theta)
    return y


def _zauner_apply_fn(L: int, theta: float, dense_limit: int):
    """Dense matmul below dense_limit, matrix-free above it."""
    if L <= dense_limit:
        U = weil_unitary(zauner_matrix(L), theta)
        return lambda z: U @ z
    if L % 2 == 1:
        return lambda z: apply_zauner(z, theta)
    mat = zauner_matrix(L)
    return lambda z: apply_weil(mat, z, theta)


def cube_phase(mat: SymplecticMatrix, theta: float = 0.0,
               rtol: float = 1e-6) -> complex:
    """Global phase gamma with U^3 = gamma * I, via a random probe.

    Raises NotOrderThree when U^3 fails to act as a scalar, which is the
    case whenever mat^3 is not the identity in SL(2, Z_L).
    """
    L = mat.L
    cubed = mat @ mat @ mat
    if not cubed.is_identity:
        raise NotOrderThree(f"matrix has order != 3 mod {L}")
    rng = np.random.default_rng(0)
    v = rng.standard_normal(L) + 1j * rng.standard_normal(L)
    w = v
    for _ in range(3):
        w = apply_weil(mat, w, theta)
    k = int(np.argmax(np.abs(v)))
    g = w[k] / v[k]
    g = g / abs(g)
    if np.linalg.norm(w - g * v) > rtol * np.linalg.norm(v):
        raise NotOrderThree(
            f"cubed unitary is not scalar at L={L} (residual too large)")
    return complex(g)


@dataclass(frozen=True)
class StarWindowResult:
    """Eigenvector window plus the diagnostics used to accept it."""

    vector: np.ndarray
    eigenvalue: complex
    residual: float
    root_index: int
    method: str
    iterations: int


def _cube_roots(gamma3: complex, theta: float) -> list:
    """Cube roots of gamma3, ordered coherently across theta.

    The root ladder is anchored to the theta-free phase gamma3 *
    exp(-3i*theta) so the same eigenspace is selected no matter what
    global phase the unitary carries.
    """
    g0 = gamma3 * np.exp(-3j * theta)
    r0 = np.exp(1j * np.angle(g0) / 3)
    w = np.exp(2j * np.pi / 3)
    return [np.exp(1j * theta) * r0 * w ** k for k in range(3)]


def _canonical_phase(g: np.ndarray) -> np.ndarray:
    j = int(np.argmax(np.abs(g)))
    return g * (np.conj(g[j]) / np.abs(g[j]))


def star_window(L: int, theta: float = 0.0, method: str = "projector",
                seed: int = 0, tol: float = 1e-8, max_iter: int = 100_000,
                dense_limit: int = DENSE_LIMIT, root_index: int = 0,
                mode: AdmissibilityMode = AdmissibilityMode.RELAXED,
                cache_dir: str | None = None) -> StarWindowResult:
    """Unit-norm eigenvector of the order-three unitary at dimension L.

    The projector method applies U three times to a seeded Gaussian
    probe, reads off the cube phase, and projects the probe onto each
    eigenspace in turn until one holds enough of it.  Power iteration is
    kept for comparison; on a unitary it has no dominant eigenvalue to
    find and is expected to raise ConvergenceError.

    With cache_dir set, a previously saved window for the same
    (L, method, seed, theta) is loaded instead of recomputed.
    """
    require_admissible(L, mode)
    if method not in ("projector", "power"):
        raise ValueError(f"unknown method {method!r}")
    if not 0 <= root_index < 3:
        raise ValueError("root_index must be 0, 1, or 2")

    if cache_dir is not None:
        path = _cache_path(cache_dir, L, method, seed, theta)
        if os.path.exists(path):
            g, _ = load_window(path, expect_L=L, expect_seed=seed)
            apply_u = _zauner_apply_fn(L, theta, dense_limit)
            ug = apply_u(g)
            lam = complex(np.vdot(g, ug))
            res = float(np.linalg.norm(ug - lam * g))
            return StarWindowResult(g, lam, res, -1, method, 0)

    apply_u = _zauner_apply_fn(L, theta, dense_limit)
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(L) + 1j * rng.standard_normal(L)

    if method == "power":
        result = _power_iteration(apply_u, v, tol, max_iter)
    else:
        result = _projector(apply_u, v, theta, tol, root_index, L)

    if cache_dir is not None:
        os.makedirs(cache_dir, exist_ok=True)
        save_window(_cache_path(cache_dir, L, method, seed, theta),
                    result.vector, seed)
    return result


def _projector(apply_u, v, theta, tol, root_index, L):
    u1 = apply_u(v)
    u2 = apply_u(u1)
    w = apply_u(u2)  # = gamma3 * v when the unitary has order three
    k = int(np.argmax(np.abs(v)))
    gamma3 = w[k] / v[k]
    gamma3 = gamma3 / abs(gamma3)
    if np.linalg.norm(w - gamma3 * v) > 1e-6 * np.linalg.norm(v):
        raise NotOrderThree(f"cubed unitary is not scalar at L={L}")

    roots = _cube_roots(gamma3, theta)
    vnorm = np.linalg.norm(v)
    last_residual = np.inf
    for j in range(3):
        idx = (root_index + j) % 3
        lam = roots[idx]
        # eigenvalues sit on the unit circle, so 1/lam is conj(lam)
        p = (v + np.conj(lam) * u1 + np.conj(lam) ** 2 * u2) / 3.0
        pnorm = np.linalg.norm(p)
        if pnorm <= 1e-8 * vnorm:
            continue  # probe barely touches this eigenspace, try the next
        g = _canonical_phase(p / pnorm)
        ug = apply_u(g)
        lam_rq = complex(np.vdot(g, ug))
        residual = float(np.linalg.norm(ug - lam_rq * g))
        if residual <= tol:
            return StarWindowResult(g, lam_rq, residual, idx, "projector", 1)
        last_residual = min(last_residual, residual)
    raise ConvergenceError(
        f"no eigenspace met tol={tol} at L={L} "
        f"(best residual {last_residual:.3e})")


def _power_iteration(apply_u, v, tol, max_iter):
    v = v / np.linalg.norm(v)
    for it in range(1, max_iter + 1):
        w = apply_u(v)
        lam = complex(np.vdot(v, w))
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= tol:
            g = _canonical_phase(v)
            return StarWindowResult(g, lam, residual, -1, "power", it)
        v = w / np.linalg.norm(w)
    raise ConvergenceError(
        f"power iteration did not reach tol={tol} in {max_iter} steps; "
        "a unitary spectrum has no dominant eigenvalue")


# ---------------------------------------------------------------------------
# window cache

WINDOW_MAGIC = b"SGWC"
WINDOW_VERSION = 1
_HEADER = struct.Struct("<4sIQq")


def _cache_path(cache_dir, L, method, seed, theta):
    tag = format(float(theta), ".9g").replace(".", "p").replace("-", "m")
    return os.path.join(cache_dir, f"star_L{L}_{method}_s{seed}_t{tag}.sgwc")


def save_window(path: str, g: np.ndarray, seed: int) -> None:
    """Write a window as header + interleaved re/im float64, little endian."""
    g = np.asarray(g, dtype=np.complex128)
    L = g.shape[0]
    buf = np.empty(2 * L, dtype="<f8")
    buf[0::2] = g.real
    buf[1::2] = g.imag
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(WINDOW_MAGIC, WINDOW_VERSION, L, seed))
        fh.write(buf.tobytes())


def load_window(path: str, expect_L: int | None = None,
                expect_seed: int | None = None):
    """Read a cached window; returns (vector, seed)."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < _HEADER.size:
        raise CacheFormatError(f"{path}: too short for a header")
    magic, version, L, seed = _HEADER.unpack_from(data)
    if magic != WINDOW_MAGIC:
        raise CacheFormatError(f"{path}: bad magic {magic!r}")
    if version != WINDOW_VERSION:
        raise CacheFormatError(f"{path}: unsupported version {version}")
    if len(data) != _HEADER.size + 16 * L:
        raise CacheFormatError(f"{path}: payload size mismatch")
    if expect_L is not None and L != expect_L:
        raise CacheFormatError(f"{path}: holds L={L}, wanted {expect_L}")
    if expect_seed is not None and seed != expect_seed:
        raise CacheFormatError(f"{path}: holds seed={seed}, wanted {expect_seed}")
    buf = np.frombuffer(data, dtype="<f8", offset=_HEADER.size)
    g = buf[0::2] + 1j * buf[1::2]
    n = np.linalg.norm(g)
    if not (0.99 < n < 1.01):
        raise CacheFormatError(f"{path}: stored window is not unit norm")
    return g, seed
