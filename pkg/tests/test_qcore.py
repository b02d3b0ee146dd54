import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_pure, seeds
from pairent.qcore import (
    NormError,
    StateError,
    all_pairs,
    apply_on_qubits,
    basis_ket,
    conjugate_state,
    inner,
    load_state,
    make_state,
    named_state,
    partial_trace,
    permute_qubits,
    qubit_pair,
    real_inner,
    reduced_density,
    save_state,
    state_from_dict,
    state_names,
    state_to_json,
)
from pairent.spectra import avg_pair_entropy, pair_entropies

OMEGA = np.exp(2j * np.pi / 3)


class TestMakeState:
    def test_basis_state(self):
        s = make_state(1, [1, 0])
        assert s.n_qubits == 1
        np.testing.assert_array_equal(s.amplitudes, [1, 0])

    def test_normalize(self):
        s = make_state(2, [1, 1, 0, 0], normalize=True)
        np.testing.assert_allclose(s.amplitudes, [2**-0.5, 2**-0.5, 0, 0], atol=1e-16)

    def test_amplitudes_read_only(self):
        s = make_state(1, [1, 0])
        with pytest.raises(ValueError):
            s.amplitudes[0] = 0

    @pytest.mark.parametrize(
        "n, amps, exc",
        [
            (2, [1, 0, 0], StateError),
            (2, [0, 0, 0, 0], StateError),
            (1, [np.nan, 1], StateError),
            (1, [1, 1], NormError),
            (0, [1], StateError),
        ],
    )
    def test_rejects(self, n, amps, exc):
        with pytest.raises(exc):
            make_state(n, amps)

    def test_zero_vector_rejected_even_when_normalizing(self):
        with pytest.raises(StateError):
            make_state(1, [0, 0], normalize=True)

    def test_small_norm_error_accepted(self):
        s = make_state(1, [1 + 5e-10, 0])
        assert abs(np.linalg.norm(s.amplitudes) - 1) <= 1e-12

    @given(seeds, st.integers(1, 6))
    def test_normalized_norm(self, seed, n):
        s = random_pure(np.random.default_rng(seed), n)
        assert abs(np.linalg.norm(s.amplitudes) - 1) <= 1e-12


class TestNamedStates:
    def test_m4_amplitudes(self):
        a = named_state("M4").amplitudes
        r6 = 1 / np.sqrt(6)
        assert a[0b0011] == pytest.approx(r6, abs=1e-16)
        assert a[0b1100] == pytest.approx(r6, abs=1e-16)
        assert a[0b0101] == pytest.approx(OMEGA * r6, abs=1e-16)
        assert a[0b1010] == pytest.approx(OMEGA * r6, abs=1e-16)
        assert a[0b0110] == pytest.approx(OMEGA.conjugate() * r6, abs=1e-16)
        assert a[0b1001] == pytest.approx(OMEGA.conjugate() * r6, abs=1e-16)
        assert np.count_nonzero(np.abs(a) > 1e-15) == 6
        assert abs(np.linalg.norm(a) - 1) < 1e-15

    def test_psi4_amplitudes(self):
        a = named_state("PSI4").amplitudes
        h = 1 / (2 * np.sqrt(2))
        expected = {0b0000: 0.5, 0b1101: 0.5, 0b0011: h, 0b1011: h, 0b0110: h, 0b1110: -h}
        for idx, val in expected.items():
            assert a[idx] == pytest.approx(val, abs=1e-16)
        assert np.count_nonzero(np.abs(a) > 1e-15) == 6

    def test_phi1_is_ghz(self):
        a = named_state("PHI1").amplitudes
        np.testing.assert_allclose(a[[0, 15]], [2**-0.5] * 2, atol=1e-16)
        assert np.count_nonzero(a) == 2

    def test_phi2(self):
        a = named_state("PHI2").amplitudes
        assert sorted(np.flatnonzero(a)) == [0b0000, 0b0111, 0b1001, 0b1110]
        np.testing.assert_allclose(a[np.flatnonzero(a)], 0.5)

    def test_case_insensitive(self):
        np.testing.assert_array_equal(named_state("m4").amplitudes, named_state("M4").amplitudes)

    def test_unknown(self):
        with pytest.raises(KeyError):
            named_state("W")

    def test_registry_lists_all(self):
        assert set(state_names()) == {"M4", "PSI4", "PHI1", "PHI2"}


class TestPairs:
    def test_parse_forms(self):
        assert qubit_pair("AB", 4) == (0, 1)
        assert qubit_pair(("C", "A"), 4) == (2, 0)
        assert qubit_pair((1, 3), 4) == (1, 3)
        assert qubit_pair("BD", 4).label() == "BD"

    @pytest.mark.parametrize("bad", ["AA", "AE", (0, 0), (0, 7), "ABC"])
    def test_bad_pairs(self, bad):
        with pytest.raises((ValueError, KeyError)):
            qubit_pair(bad, 4)

    def test_all_pairs(self):
        assert [p.label() for p in all_pairs(4)] == ["AB", "AC", "AD", "BC", "BD", "CD"]


class TestPartialTrace:
    def test_psi4_ac_maximally_mixed(self):
        np.testing.assert_allclose(partial_trace(named_state("PSI4"), "AC"), np.eye(4) / 4, atol=1e-12)

    def test_m4_spectrum(self):
        lam = np.linalg.eigvalsh(partial_trace(named_state("M4"), "AB"))
        np.testing.assert_allclose(lam, [1 / 6, 1 / 6, 1 / 6, 1 / 2], atol=1e-12)

    def test_product_state(self):
        s = make_state(4, basis_ket("0110"))
        rho = partial_trace(s, "BD")
        expected = np.zeros((4, 4))
        expected[0b10, 0b10] = 1
        np.testing.assert_array_equal(rho, expected)

    def test_ordering_follows_pair(self):
        # rho_{BA} is rho_{AB} with the two tensor factors swapped
        s = named_state("PSI4")
        ab = partial_trace(s, "AB").reshape(2, 2, 2, 2)
        ba = partial_trace(s, ("B", "A")).reshape(2, 2, 2, 2)
        np.testing.assert_allclose(ba, ab.transpose(1, 0, 3, 2), atol=1e-15)

    @given(seeds)
    def test_density_properties(self, seed):
        s = random_pure(np.random.default_rng(seed))
        for p in all_pairs(4):
            rho = partial_trace(s, p)
            assert abs(np.trace(rho) - 1) <= 1e-12
            np.testing.assert_allclose(rho, rho.conj().T, atol=1e-12)
            assert np.linalg.eigvalsh(rho).min() >= -1e-12

    @given(seeds)
    def test_brute_force_oracle(self, seed):
        s = random_pure(np.random.default_rng(seed))
        full = np.outer(s.amplitudes, s.amplitudes.conj()).reshape((2,) * 8)
        # keep A, C: trace B (axes 1, 5) then D
        rho = np.einsum("abcdebfd->acef", full).reshape(4, 4)
        np.testing.assert_allclose(partial_trace(s, "AC"), rho, atol=1e-14)


class TestPermute:
    def test_identity(self):
        s = named_state("PSI4")
        np.testing.assert_array_equal(permute_qubits(s, [0, 1, 2, 3]).amplitudes, s.amplitudes)

    def test_moves_qubits(self):
        s = make_state(4, basis_ket("1000"))
        # qubit A goes to position D
        t = permute_qubits(s, [3, 0, 1, 2])
        np.testing.assert_array_equal(t.amplitudes, basis_ket("0001"))

    def test_m4_swap_cd(self):
        s = permute_qubits(named_state("M4"), [0, 1, 3, 2])
        assert avg_pair_entropy(s) == pytest.approx(1.7924812503605783, abs=1e-12)

    @pytest.mark.parametrize("bad", [[0, 1, 2], [0, 0, 1, 2], [0, 1, 2, 4]])
    def test_rejects_non_permutation(self, bad):
        with pytest.raises(ValueError):
            permute_qubits(named_state("M4"), bad)

    @given(seeds, st.permutations(range(4)))
    def test_e2_invariant(self, seed, perm):
        s = random_pure(np.random.default_rng(seed))
        assert avg_pair_entropy(permute_qubits(s, list(perm))) == pytest.approx(avg_pair_entropy(s), abs=1e-12)

    @given(seeds, st.permutations(range(4)))
    def test_pair_entropies_relabel(self, seed, perm):
        s = random_pure(np.random.default_rng(seed))
        before = pair_entropies(s)
        after = pair_entropies(permute_qubits(s, list(perm)))
        for p in all_pairs(4):
            moved = "".join("ABCD"[perm[q]] for q in p)
            key = "".join(sorted(moved))
            assert after[key] == pytest.approx(before[p.label()], abs=1e-12)


class TestConjugateAndInner:
    def test_conjugate_swaps_omega(self):
        m4, c = named_state("M4"), conjugate_state(named_state("M4"))
        assert c.amplitudes[0b0101] == pytest.approx(m4.amplitudes[0b0110], abs=1e-16)

    @given(seeds)
    def test_conjugate_involution_and_entropies(self, seed):
        s = random_pure(np.random.default_rng(seed))
        c = conjugate_state(s)
        np.testing.assert_allclose(conjugate_state(c).amplitudes, s.amplitudes, rtol=0, atol=1e-15)
        assert avg_pair_entropy(c) == pytest.approx(avg_pair_entropy(s), abs=1e-12)

    def test_inner(self):
        a, b = basis_ket("00") , 1j * basis_ket("00")
        assert inner(a, b) == 1j
        assert real_inner(a, b) == 0.0
        assert inner(named_state("M4"), named_state("M4")) == pytest.approx(1, abs=1e-15)

    def test_inner_length_mismatch(self):
        with pytest.raises(ValueError):
            inner(np.ones(2), np.ones(4))


class TestApplyOnQubits:
    @given(seeds)
    def test_matches_kron(self, seed):
        rng = np.random.default_rng(seed)
        s = random_pure(rng)
        op = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        # acting on (B, C) equals I (x) op (x) I
        full = np.kron(np.kron(np.eye(2), op), np.eye(2))
        np.testing.assert_allclose(apply_on_qubits(op, s.amplitudes, (1, 2), 4), full @ s.amplitudes, atol=1e-13)


class TestStateFiles:
    def test_round_trip_bit_exact(self, tmp_path):
        s = random_pure(np.random.default_rng(3))
        path = tmp_path / "s.json"
        save_state(s, path)
        t = load_state(path)
        assert t.n_qubits == 4
        np.testing.assert_array_equal(t.amplitudes, s.amplitudes)

    def test_schema(self):
        doc = json.loads(state_to_json(named_state("PHI1")))
        assert doc["version"] == 1 and doc["n_qubits"] == 4
        assert len(doc["amplitudes"]) == 16 and doc["amplitudes"][0] == [2**-0.5, 0.0]

    @pytest.mark.parametrize(
        "doc",
        [
            [],
            {"version": 2, "n_qubits": 1, "amplitudes": [[1, 0], [0, 0]]},
            {"version": 1, "amplitudes": [[1, 0], [0, 0]]},
            {"version": 1, "n_qubits": 1, "amplitudes": [[1, 0]]},
            {"version": 1, "n_qubits": 1, "amplitudes": [[1], [0, 0]]},
            {"version": 1, "n_qubits": "1", "amplitudes": [[1, 0], [0, 0]]},
        ],
    )
    def test_malformed(self, doc):
        with pytest.raises(StateError):
            state_from_dict(doc)

    def test_unnormalized_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"version": 1, "n_qubits": 1, "amplitudes": [[1, 0], [1, 0]]}))
        with pytest.raises(NormError):
            load_state(path)

    def test_not_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{not json")
        with pytest.raises(StateError):
            load_state(path)


def test_reduced_density_single_qubit():
    rho = reduced_density(named_state("M4"), [2])
    np.testing.assert_allclose(rho, np.eye(2) / 2, atol=1e-15)
