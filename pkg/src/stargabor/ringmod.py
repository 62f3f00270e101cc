"""Residue arithmetic and ambient-dimension admissibility.

Everything downstream lives in Z_L, and the eigenvector construction only
works when L is odd, divisible by three, and (in the strict regime)
square-free.  This module owns the residue type, the factorization
helpers, and the search for usable dimensions near a requested size.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import EmptyResult, AdmissibilityError, NotInvertible


def mod_inverse(v: int, L: int) -> int:
    """Multiplicative inverse of v mod L, as an int in [0, L)."""
    if L <= 0:
        raise ValueError("modulus must be positive")
    try:
        return pow(v, -1, L)
    except ValueError as exc:
        raise NotInvertible(f"{v} has no inverse mod {L}") from exc


@dataclass(frozen=True)
class Residue:
    """Element of Z_L, held as its canonical representative in [0, L)."""

    value: int
    modulus: int

    def __post_init__(self):
        if self.modulus <= 0:
            raise ValueError("modulus must be positive")
        object.__setattr__(self, "value", self.value % self.modulus)

    def _join(self, other: "Residue") -> None:
        if self.modulus != other.modulus:
            raise ValueError(
                f"mixed moduli: {self.modulus} vs {other.modulus}")

    def __add__(self, other: "Residue") -> "Residue":
        self._join(other)
        return Residue(self.value + other.value, self.modulus)

    def __sub__(self, other: "Residue") -> "Residue":
        self._join(other)
        return Residue(self.value - other.value, self.modulus)

    def __mul__(self, other: "Residue") -> "Residue":
        self._join(other)
        return Residue(self.value * other.value, self.modulus)

    def __neg__(self) -> "Residue":
        return Residue(-self.value, self.modulus)

    def __pow__(self, k: int) -> "Residue":
        try:
            return Residue(pow(self.value, k, self.modulus), self.modulus)
        except ValueError as exc:
            raise NotInvertible(
                f"{self.value} has no inverse mod {self.modulus}") from exc

    def inverse(self) -> "Residue":
        return Residue(mod_inverse(self.value, self.modulus), self.modulus)

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True)
class Factorization:
    """n written as a product of prime powers, keyed by prime."""

    n: int
    factors: dict

    @property
    def primes(self) -> tuple:
        return tuple(sorted(self.factors))

    @property
    def is_square_free(self) -> bool:
        return all(e == 1 for e in self.factors.values())

    @property
    def all_exponents_even(self) -> bool:
        # n = 1 has no factors; vacuously a perfect square.
        return all(e % 2 == 0 for e in self.factors.values())

    def divisors(self) -> tuple:
        divs = [1]
        for p, e in sorted(self.factors.items()):
            divs = [d * p ** k for d in divs for k in range(e + 1)]
        return tuple(sorted(divs))


def factorize(n: int) -> Factorization:
    """Trial-division factorization. Fine for the sizes used here."""
    if n <= 0:
        raise ValueError("factorize expects a positive integer")
    m = n
    factors = {}
    e = 0
    while m % 2 == 0:
        m //= 2
        e += 1
    if e:
        factors[2] = e
    p = 3
    while p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
        p += 2
    if m > 1:
        factors[m] = 1
    return Factorization(n, factors)


def _factor_smooth(n: int, cap: int):
    """Factor n if every prime factor is <= cap, else None.

    Only divides by primes up to cap, so rejection of rough numbers is
    cheap: whatever remains after that must have all factors above cap.
    """
    m = n
    factors = {}
    p = 2
    while p <= cap and p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors[p] = e
        p += 1 if p == 2 else 2
    if m > 1:
        if m > cap:
            return None
        factors[m] = factors.get(m, 0) + 1
    return factors


class AdmissibilityMode(str, Enum):
    STRICT = "strict"
    RELAXED = "relaxed"


def check_admissible(L: int, mode: AdmissibilityMode = AdmissibilityMode.RELAXED):
    """Decide whether L supports the order-three eigenvector construction.

    Both regimes need L odd and divisible by three.  Strict additionally
    wants L square-free; relaxed only rules out every prime exponent
    being even.  Returns (ok, reasons) with one string per violation.
    """
    if L <= 0:
        raise ValueError("L must be positive")
    mode = AdmissibilityMode(mode)
    reasons = []
    if L % 2 == 0:
        reasons.append("L is even")
    if L % 3 != 0:
        reasons.append("L is not divisible by 3")
    fac = factorize(L)
    if mode is AdmissibilityMode.STRICT:
        if not fac.is_square_free:
            reasons.append("L is not square-free")
    else:
        if fac.all_exponents_even:
            reasons.append("all prime exponents of L are even")
    return (not reasons, reasons)


def require_admissible(L: int, mode: AdmissibilityMode = AdmissibilityMode.RELAXED) -> None:
    ok, reasons = check_admissible(L, mode)
    if not ok:
        raise AdmissibilityError(f"L={L}: " + "; ".join(reasons))


@dataclass(frozen=True)
class DimensionCandidate:
    """An admissible dimension near a requested signal length."""

    L: int
    factorization: Factorization
    divisors: tuple
    strict: bool


def enumerate_dimensions(T: int,
                         mode: AdmissibilityMode = AdmissibilityMode.RELAXED,
                         prime_cap: int = 23,
                         top: int | None = 10) -> list:
    """Largest admissible dimensions L <= T, in descending order.

    Candidates are kept prime_cap-smooth so the divisor lattice stays
    rich enough to offer a spread of time/frequency step pairs.  Returns
    at most `top` candidates (all of them when top is None); raises
    EmptyResult when the range holds none.
    """
    if T < 3:
        raise EmptyResult(f"no admissible dimension at or below {T}")
    mode = AdmissibilityMode(mode)
    out = []
    # odd and divisible by 3 means L = 3 (mod 6)
    start = T - ((T - 3) % 6)
    for L in range(start, 2, -6):
        factors = _factor_smooth(L, prime_cap)
        if factors is None:
            continue
        fac = Factorization(L, factors)
        if mode is AdmissibilityMode.STRICT:
            if not fac.is_square_free:
                continue
        elif fac.all_exponents_even:
            continue
        out.append(DimensionCandidate(
            L=L,
            factorization=fac,
            divisors=fac.divisors(),
            strict=fac.is_square_free,
        ))
        if top is not None and len(out) >= top:
            break
    if not out:
        raise EmptyResult(
            f"no admissible dimension at or below {T} "
            f"(mode={mode.value}, prime_cap={prime_cap})")
    return out
