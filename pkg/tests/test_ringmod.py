import math

import pytest
from hypothesis import given, settings, strategies as st

from stargabor import (
    AdmissibilityMode,
    Residue,
    check_admissible,
    enumerate_dimensions,
    factorize,
    mod_inverse,
    require_admissible,
)
from stargabor.errors import AdmissibilityError, EmptyResult, NotInvertible


class TestModInverse:
    def test_known_value(self):
        assert mod_inverse(5, 21) == 17

    def test_inverse_is_canonical(self):
        v = mod_inverse(-2, 7)
        assert 0 <= v < 7
        assert (-2 * v) % 7 == 1

    def test_not_coprime_raises(self):
        with pytest.raises(NotInvertible):
            mod_inverse(6, 21)
        with pytest.raises(NotInvertible):
            mod_inverse(0, 5)

    @given(st.integers(min_value=2, max_value=10**6),
           st.integers(min_value=-10**6, max_value=10**6))
    def test_involution(self, L, v):
        if math.gcd(v, L) != 1:
            with pytest.raises(NotInvertible):
                mod_inverse(v, L)
            return
        w = mod_inverse(v, L)
        assert (v * w) % L == 1
        assert mod_inverse(w, L) == v % L


class TestResidue:
    def test_canonical_representative(self):
        assert Residue(-1, 21).value == 20
        assert Residue(43, 21).value == 1

    def test_arithmetic(self):
        a = Residue(5, 21)
        b = Residue(20, 21)
        assert (a + b).value == 4
        assert (a - b).value == 6
        assert (a * b).value == (5 * 20) % 21
        assert (-a).value == 16

    def test_pow_and_inverse(self):
        a = Residue(5, 21)
        assert (a ** -1).value == 17
        assert a.inverse().value == 17
        assert (a ** 3).value == pow(5, 3, 21)

    def test_mixed_moduli_rejected(self):
        with pytest.raises(ValueError):
            Residue(1, 3) + Residue(1, 5)


class TestFactorize:
    def test_known_factorizations(self):
        assert factorize(33915).factors == {3: 1, 5: 1, 7: 1, 17: 1, 19: 1}
        assert factorize(200583).factors == {3: 3, 17: 1, 19: 1, 23: 1}
        assert factorize(4095).factors == {3: 2, 5: 1, 7: 1, 13: 1}
        assert factorize(1).factors == {}

    def test_square_free_flag(self):
        assert factorize(33915).is_square_free
        assert not factorize(200583).is_square_free
        assert factorize(9).all_exponents_even
        assert not factorize(4095).all_exponents_even

    def test_divisors(self):
        assert factorize(12).divisors() == (1, 2, 3, 4, 6, 12)
        assert len(factorize(33915).divisors()) == 32

    @given(st.integers(min_value=1, max_value=10**6))
    def test_reconstruction(self, n):
        fac = factorize(n)
        prod = 1
        for p, e in fac.factors.items():
            prod *= p ** e
        assert prod == n


class TestAdmissibility:
    def test_strict_examples(self):
        assert check_admissible(33915, AdmissibilityMode.STRICT) == (True, [])
        ok, reasons = check_admissible(200583, AdmissibilityMode.STRICT)
        assert not ok and "square-free" in reasons[0]

    def test_relaxed_examples(self):
        assert check_admissible(200583, AdmissibilityMode.RELAXED)[0]
        assert check_admissible(4095)[0]
        assert check_admissible(27531)[0]
        assert not check_admissible(27531, "strict")[0]

    def test_basic_violations(self):
        ok, reasons = check_admissible(6)
        assert not ok and any("even" in r for r in reasons)
        ok, reasons = check_admissible(5)
        assert not ok and any("divisible by 3" in r for r in reasons)
        # odd multiple of 3 that is a perfect square
        ok, reasons = check_admissible(9)
        assert not ok

    def test_require_raises(self):
        require_admissible(105, "strict")
        with pytest.raises(AdmissibilityError):
            require_admissible(12)

    @settings(max_examples=200)
    @given(st.integers(min_value=0, max_value=(10**5 - 3) // 6))
    def test_strict_implies_relaxed(self, k):
        L = 6 * k + 3
        if check_admissible(L, "strict")[0]:
            assert check_admissible(L, "relaxed")[0]


class TestEnumerateDimensions:
    def test_smallest(self):
        cands = enumerate_dimensions(3, "strict")
        assert [c.L for c in cands] == [3]
        assert cands[0].divisors == (1, 3)

    def test_empty_below_three(self):
        with pytest.raises(EmptyResult):
            enumerate_dimensions(2)

    def test_known_targets(self):
        got = [c.L for c in enumerate_dimensions(36240, top=50)]
        assert 33915 in got
        assert enumerate_dimensions(27680, top=1)[0].L == 27531
        assert enumerate_dimensions(36240, "strict", top=1)[0].L == 33915

    def test_candidates_are_valid(self):
        for mode in ("strict", "relaxed"):
            cands = enumerate_dimensions(5000, mode, prime_cap=23, top=12)
            Ls = [c.L for c in cands]
            assert Ls == sorted(Ls, reverse=True)
            for c in cands:
                assert c.L <= 5000
                assert check_admissible(c.L, mode)[0]
                assert all(c.L % d == 0 for d in c.divisors)
                assert all(p <= 23 for p in c.factorization.primes)
                assert c.strict == c.factorization.is_square_free

    def test_prime_cap_filters(self):
        # 33915 has 17 and 19 as factors; a low cap must drop it
        got = [c.L for c in enumerate_dimensions(33915, prime_cap=13, top=50)]
        assert 33915 not in got
        assert all(max(factorize(L).primes) <= 13 for L in got)
