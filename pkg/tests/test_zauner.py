import numpy as np
import pytest

from stargabor import zauner
from stargabor.errors import (
    AdmissibilityError,
    CacheFormatError,
    ConvergenceError,
    NotInvertible,
    NotOrderThree,
    TooLarge,
)
from stargabor.ringmod import Residue

ADMISSIBLE_SET = [3, 15, 21, 33, 105]


def shear(L):
    return zauner.SymplecticMatrix(
        Residue(1, L), Residue(1, L), Residue(0, L), Residue(1, L))


class TestSymplecticMatrix:
    def test_determinant_enforced(self):
        with pytest.raises(ValueError):
            zauner.SymplecticMatrix(
                Residue(1, 5), Residue(1, 5), Residue(1, 5), Residue(1, 5))

    def test_zauner_has_order_three(self):
        for L in ADMISSIBLE_SET + [9, 27]:
            m = zauner.zauner_matrix(L)
            assert not m.is_identity
            assert (m @ m @ m).is_identity
            assert not (m @ m).is_identity

    def test_identity(self):
        assert zauner.SymplecticMatrix.identity(7).is_identity


class TestTauPowers:
    def test_basic_relations(self):
        for L in (3, 4, 15):
            tau = zauner.tau_powers(L)
            assert tau[0] == 1.0
            assert abs(tau[L] - (-1.0) ** (L + 1)) < 1e-14
            assert abs(tau[1] + np.exp(1j * np.pi / L)) < 1e-14
            # group law within the table
            assert abs(tau[3] - tau[1] * tau[2]) < 1e-14


class TestWeilUnitary:
    def test_known_entry_at_three(self):
        U = zauner.weil_unitary(zauner.zauner_matrix(3))
        want = np.exp(4j * np.pi / 3) / np.sqrt(3)
        assert abs(U[1, 0] - want) < 1e-15

    @pytest.mark.parametrize("L", ADMISSIBLE_SET)
    def test_unitarity(self, L):
        U = zauner.weil_unitary(zauner.zauner_matrix(L))
        assert np.abs(U.conj().T @ U - np.eye(L)).max() < 1e-10

    def test_unitarity_even_dimension(self):
        # the lift itself only needs the upper-right entry invertible
        U = zauner.weil_unitary(zauner.zauner_matrix(4))
        assert np.abs(U.conj().T @ U - np.eye(4)).max() < 1e-10

    @pytest.mark.parametrize("L", ADMISSIBLE_SET)
    def test_cube_is_scalar(self, L):
        U = zauner.weil_unitary(zauner.zauner_matrix(L))
        U3 = U @ U @ U
        g = U3[0, 0]
        assert abs(abs(g) - 1) < 1e-10
        assert np.abs(U3 - g * np.eye(L)).max() < 1e-8

    def test_theta_is_a_global_phase(self):
        m = zauner.zauner_matrix(15)
        U0 = zauner.weil_unitary(m)
        Ut = zauner.weil_unitary(m, theta=0.7)
        assert np.abs(Ut - np.exp(0.7j) * U0).max() < 1e-14

    def test_noninvertible_upper_right_rejected(self):
        with pytest.raises(NotInvertible):
            zauner.weil_unitary(shear(9) @ shear(9) @ shear(9))

    def test_dense_cap(self):
        with pytest.raises(TooLarge):
            zauner.weil_unitary(zauner.zauner_matrix(9999))


class TestApplyRoutes:
    @pytest.mark.parametrize("L", [15, 105])
    def test_block_apply_matches_dense(self, L):
        rng = np.random.default_rng(L)
        m = zauner.zauner_matrix(L)
        x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        U = zauner.weil_unitary(m, theta=0.3)
        got = zauner.apply_weil(m, x, theta=0.3, block_rows=13)
        assert np.abs(U @ x - got).max() < 1e-12

    @pytest.mark.parametrize("L", [15, 105])
    def test_fast_apply_matches_dense(self, L):
        rng = np.random.default_rng(L + 1)
        x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        U = zauner.weil_unitary(zauner.zauner_matrix(L), theta=1.1)
        got = zauner.apply_zauner(x, theta=1.1)
        assert np.abs(U @ x - got).max() < 1e-12

    def test_fast_apply_rejects_even(self):
        with pytest.raises(ValueError):
            zauner.apply_zauner(np.ones(4, dtype=complex))

    def test_generic_apply_other_matrix(self):
        # a non-Zauner element exercises the full quadratic form
        L = 21
        m = shear(L) @ zauner.zauner_matrix(L)
        rng = np.random.default_rng(5)
        x = rng.standard_normal(L) + 1j * rng.standard_normal(L)
        U = zauner.weil_unitary(m)
        assert np.abs(U @ x - zauner.apply_weil(m, x, block_rows=4)).max() < 1e-12


class TestCubePhase:
    @pytest.mark.parametrize("L", [15, 21])
    def test_matches_dense_trace(self, L):
        m = zauner.zauner_matrix(L)
        U = zauner.weil_unitary(m)
        tr = np.trace(U @ U @ U) / L
        got = zauner.cube_phase(m)
        assert abs(got - tr / abs(tr)) < 1e-10

    def test_order_three_required(self):
        with pytest.raises(NotOrderThree):
            zauner.cube_phase(shear(15))

    def test_theta_shifts_cube_phase(self):
        m = zauner.zauner_matrix(15)
        g0 = zauner.cube_phase(m)
        gt = zauner.cube_phase(m, theta=0.5)
        assert abs(gt - g0 * np.exp(1.5j)) < 1e-10


class TestStarWindow:
    @pytest.mark.parametrize("L", ADMISSIBLE_SET)
    def test_residual_and_norm(self, L):
        r = zauner.star_window(L)
        assert r.residual <= 1e-8
        assert abs(np.linalg.norm(r.vector) - 1) <= 1e-12

    def test_deterministic(self):
        a = zauner.star_window(105)
        b = zauner.star_window(105)
        assert np.array_equal(a.vector, b.vector)

    def test_theta_selects_same_eigenspace(self):
        a = zauner.star_window(105)
        b = zauner.star_window(105, theta=np.pi / 7)
        assert abs(abs(np.vdot(a.vector, b.vector)) - 1) <= 1e-8
        assert abs(b.eigenvalue - a.eigenvalue * np.exp(1j * np.pi / 7)) < 1e-8

    def test_dense_and_matrix_free_agree(self):
        a = zauner.star_window(105, dense_limit=2048)
        b = zauner.star_window(105, dense_limit=1)
        assert np.abs(a.vector - b.vector).max() < 1e-12

    def test_eigenvector_against_dense_eig(self):
        L = 15
        r = zauner.star_window(L)
        U = zauner.weil_unitary(zauner.zauner_matrix(L))
        w, V = np.linalg.eig(U)
        # returned eigenvalue sits on the spectrum
        assert np.min(np.abs(w - r.eigenvalue)) < 1e-10
        # and the vector lies in that eigenspace
        sel = np.abs(w - r.eigenvalue) < 1e-8
        B = np.linalg.qr(V[:, sel])[0]
        proj = B @ (B.conj().T @ r.vector)
        assert np.linalg.norm(proj - r.vector) < 1e-8

    def test_other_roots_give_other_eigenvalues(self):
        lams = {np.round(zauner.star_window(15, root_index=k).eigenvalue, 8)
                for k in range(3)}
        assert len(lams) == 3

    def test_canonical_phase(self):
        g = zauner.star_window(33).vector
        j = int(np.argmax(np.abs(g)))
        assert abs(g[j].imag) < 1e-12 and g[j].real > 0

    def test_admissibility_gate(self):
        with pytest.raises(AdmissibilityError):
            zauner.star_window(12)
        with pytest.raises(AdmissibilityError):
            zauner.star_window(9)  # perfect square fails even relaxed
        zauner.star_window(4095 // 39 * 3)  # odd multiple of 3 passes

    def test_power_iteration_does_not_converge(self):
        with pytest.raises(ConvergenceError):
            zauner.star_window(15, method="power", max_iter=300)

    def test_unknown_method_rejected(self):
        with pytest.raises(ValueError):
            zauner.star_window(15, method="qr")


class TestWindowCache:
    def test_round_trip(self, tmp_path):
        rng = np.random.default_rng(1)
        g = rng.standard_normal(33) + 1j * rng.standard_normal(33)
        g /= np.linalg.norm(g)
        p = tmp_path / "w.sgwc"
        zauner.save_window(str(p), g, seed=42)
        back, seed = zauner.load_window(str(p))
        assert seed == 42
        assert np.array_equal(back, g)

    def test_star_window_uses_cache(self, tmp_path):
        a = zauner.star_window(105, cache_dir=str(tmp_path))
        assert a.iterations == 1
        b = zauner.star_window(105, cache_dir=str(tmp_path))
        assert b.iterations == 0  # cache hit
        assert np.array_equal(a.vector, b.vector)
        assert b.residual <= 1e-8

    def test_bad_magic(self, tmp_path):
        p = tmp_path / "bad.sgwc"
        p.write_bytes(b"XXXX" + b"\x00" * 64)
        with pytest.raises(CacheFormatError):
            zauner.load_window(str(p))

    def test_truncated(self, tmp_path):
        rng = np.random.default_rng(2)
        g = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        g /= np.linalg.norm(g)
        p = tmp_path / "w.sgwc"
        zauner.save_window(str(p), g, seed=0)
        p.write_bytes(p.read_bytes()[:-8])
        with pytest.raises(CacheFormatError):
            zauner.load_window(str(p))

    def test_dimension_mismatch(self, tmp_path):
        rng = np.random.default_rng(3)
        g = rng.standard_normal(15) + 1j * rng.standard_normal(15)
        g /= np.linalg.norm(g)
        p = tmp_path / "w.sgwc"
        zauner.save_window(str(p), g, seed=0)
        with pytest.raises(CacheFormatError):
            zauner.load_window(str(p), expect_L=21)
