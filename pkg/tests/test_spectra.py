import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_density, random_hermitian, random_pure, seeds
from pairent.qcore import all_pairs, basis_ket, make_state, named_state, partial_trace, reduced_density
from pairent.spectra import (
    RankDeficientError,
    avg_pair_entropy,
    check_hermitian,
    eigh,
    entropy_bits,
    entropy_side,
    jacobi_eigh,
    log_on_support,
    min_side_eigenvalue,
    pair_entropies,
    pair_entropy,
)

E2_M4 = 1 + 0.5 * np.log2(3)
LN3, LN6 = np.log(3), np.log(6)
PHI_MINUS = np.array([0, 1, -1, 0]) / np.sqrt(2)


class TestEigh:
    @given(seeds, st.integers(1, 8))
    def test_jacobi_matches_lapack(self, seed, dim):
        h = random_hermitian(np.random.default_rng(seed), dim)
        a, b = jacobi_eigh(h), eigh(h)
        np.testing.assert_allclose(a.eigenvalues, b.eigenvalues, atol=1e-12)

    @given(seeds, st.integers(1, 8), st.sampled_from(["lapack", "jacobi"]))
    def test_decomposition(self, seed, dim, method):
        h = random_hermitian(np.random.default_rng(seed), dim)
        s = eigh(h, method=method)
        v = s.eigenvectors
        np.testing.assert_allclose(v.conj().T @ v, np.eye(dim), atol=1e-12)
        np.testing.assert_allclose(s.reconstruct(), h, atol=1e-12)
        assert np.all(np.diff(s.eigenvalues) >= 0)

    @pytest.mark.parametrize("method", ["lapack", "jacobi"])
    def test_degenerate(self, method):
        rho = partial_trace(named_state("M4"), "AB")
        s = eigh(rho, method=method)
        np.testing.assert_allclose(s.eigenvalues, [1 / 6, 1 / 6, 1 / 6, 1 / 2], atol=1e-14)
        # the top eigenvector is the singlet up to phase
        assert abs(np.vdot(PHI_MINUS, s.eigenvectors[:, 3])) == pytest.approx(1, abs=1e-12)
        np.testing.assert_allclose(s.reconstruct(), rho, atol=1e-14)

    def test_jacobi_already_diagonal(self):
        s = jacobi_eigh(np.diag([3.0, -1.0, 2.0]))
        np.testing.assert_array_equal(s.eigenvalues, [-1.0, 2.0, 3.0])

    def test_jacobi_zero(self):
        np.testing.assert_array_equal(jacobi_eigh(np.zeros((3, 3))).eigenvalues, 0)

    def test_rejects_non_hermitian(self):
        with pytest.raises(ValueError):
            eigh(np.array([[0, 1], [0, 0]]))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError):
            check_hermitian(np.zeros((2, 3)))

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            eigh(np.eye(2), method="qr")


class TestEntropy:
    def test_pure_is_zero(self):
        v = named_state("M4").amplitudes
        assert entropy_bits(np.outer(v, v.conj())) == pytest.approx(0, abs=1e-12)

    def test_maximally_mixed(self):
        assert entropy_bits(np.eye(4) / 4) == pytest.approx(2, abs=1e-15)

    def test_m4_pair(self):
        # -(3/6) log2(1/6) - (1/2) log2(1/2)
        assert pair_entropy(named_state("M4"), "AB") == pytest.approx(0.5 * np.log2(6) + 0.5, abs=1e-14)

    @given(seeds)
    def test_bounds(self, seed):
        rho = random_density(np.random.default_rng(seed), floor=0.0)
        assert -1e-12 <= entropy_bits(rho) <= 2 + 1e-12

    def test_e2_m4(self):
        assert avg_pair_entropy(named_state("M4")) == pytest.approx(E2_M4, abs=1e-12)
        assert E2_M4 == pytest.approx(1.7924813, abs=1e-7)

    def test_e2_psi4_first_principles(self):
        s = named_state("PSI4")
        lam = np.array([2 - np.sqrt(2)] * 2 + [2 + np.sqrt(2)] * 2) / 8
        e_ab = -np.sum(lam * np.log2(lam))
        ent = pair_entropies(s)
        assert ent["AB"] == pytest.approx(e_ab, abs=1e-12)
        assert ent["AD"] == pytest.approx(e_ab, abs=1e-12)
        assert ent["AC"] == pytest.approx(2, abs=1e-12)
        assert avg_pair_entropy(s) == pytest.approx((2 * e_ab + 2) / 3, abs=1e-12)
        assert avg_pair_entropy(s) == pytest.approx(1.73392, abs=1e-5)

    def test_product_zero(self):
        assert avg_pair_entropy(make_state(4, basis_ket("0101"))) == 0.0

    def test_ghz(self):
        assert avg_pair_entropy(named_state("PHI1")) == pytest.approx(1.0, abs=1e-12)

    @given(seeds)
    def test_complementary_pairs_equal(self, seed):
        e = pair_entropies(random_pure(np.random.default_rng(seed)))
        for a, b in (("AB", "CD"), ("AC", "BD"), ("AD", "BC")):
            assert e[a] == pytest.approx(e[b], abs=1e-10)

    @given(seeds, st.integers(3, 6))
    def test_e2_is_mean_and_bounded(self, seed, n):
        s = random_pure(np.random.default_rng(seed), n)
        ent = pair_entropies(s)
        e2 = avg_pair_entropy(s)
        assert e2 == pytest.approx(np.mean(list(ent.values())), abs=1e-12)
        assert 0 <= e2 <= min(2, n - 2) + 1e-12

    @given(seeds)
    def test_four_qubit_three_pair_form(self, seed):
        s = random_pure(np.random.default_rng(seed))
        e = pair_entropies(s)
        assert avg_pair_entropy(s) == pytest.approx((e["AB"] + e["AC"] + e["AD"]) / 3, abs=1e-10)

    def test_side_choice(self):
        assert entropy_side(4, (0, 1)) == (0, 1)
        assert entropy_side(3, (0, 2)) == (1,)
        assert entropy_side(2, (0, 1)) == ()

    def test_two_qubits_zero(self):
        bell = make_state(2, [1, 0, 0, 1], normalize=True)
        assert avg_pair_entropy(bell) == 0.0

    @given(seeds)
    def test_three_qubits_uses_complement(self, seed):
        s = random_pure(np.random.default_rng(seed), 3)
        # E_AB equals the entropy of qubit C
        assert pair_entropy(s, "AB") == pytest.approx(entropy_bits(reduced_density(s, [2])), abs=1e-12)
        assert pair_entropy(s, "AB") == pytest.approx(entropy_bits(partial_trace(s, "AB")), abs=1e-10)

    def test_min_side_eigenvalue(self):
        assert min_side_eigenvalue(named_state("M4").amplitudes, 4) == pytest.approx(1 / 6)
        assert min_side_eigenvalue(named_state("PHI1").amplitudes, 4) == pytest.approx(0, abs=1e-15)


class TestLog:
    def test_m4_closed_form(self):
        expected = LN3 * np.outer(PHI_MINUS, PHI_MINUS) - LN6 * np.eye(4)
        for p in all_pairs(4):
            np.testing.assert_allclose(log_on_support(partial_trace(named_state("M4"), p)), expected, atol=1e-12)

    @given(seeds)
    def test_exp_inverts(self, seed):
        rho = random_density(np.random.default_rng(seed))
        s = eigh(log_on_support(rho))
        np.testing.assert_allclose(s.reconstruct(np.exp), rho, atol=1e-12)

    def test_support_only(self):
        rho = np.diag([0.5, 0.5, 0.0, 0.0])
        np.testing.assert_allclose(log_on_support(rho), np.diag([np.log(0.5)] * 2 + [0, 0]), atol=1e-15)

    def test_require_full_support(self):
        with pytest.raises(RankDeficientError):
            log_on_support(np.diag([1.0, 0.0]), require_full_support=True)

    def test_threshold(self):
        rho = np.diag([1 - 1e-11, 1e-11])
        assert log_on_support(rho)[1, 1] == 0.0
        assert log_on_support(rho, threshold=1e-12)[1, 1] == pytest.approx(np.log(1e-11))
