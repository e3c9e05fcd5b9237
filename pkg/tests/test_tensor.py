"""Tensor kernel: symmetrization, flattening, contractions, eigendecomposition."""

import numpy as np
import pytest

from contratensor import (
    Decomposition,
    build_exact_tensor,
    canonical_sign,
    contract3,
    flatten,
    load_symtensor4,
    quad_form,
    rank_one,
    reshape_vec,
    save_symtensor4,
    subtract_rank_ones,
    sym_eig,
    symmetrize,
)

RNG = np.random.default_rng(20240401)


def random_symmetric(p, rng=RNG):
    return symmetrize(rng.standard_normal((p, p, p, p)))


# A two-variable tensor with a known two-term decomposition, printed to five
# digits in the worked references below: 2 * e1^(x)4 + [0.0998, 0.995]^(x)4.
KNOWN_2D_TERMS = [(2.0, np.array([1.0, 0.0])), (1.0, np.array([0.0998, 0.995]))]


class TestSymmetrize:
    def test_idempotent_on_symmetric(self):
        t = random_symmetric(3)
        np.testing.assert_array_equal(symmetrize(t), t)

    def test_single_entry(self):
        t = symmetrize(np.full((1, 1, 1, 1), 3.5))
        assert t[0, 0, 0, 0] == 3.5

    def test_single_offdiagonal_entry_spreads_to_quarter(self):
        # The 24 position permutations map (0,0,0,1) onto four distinct
        # indices, six permutations each: average is 6/24 = 1/4.
        raw = np.zeros((2, 2, 2, 2))
        raw[0, 0, 0, 1] = 1.0
        out = symmetrize(raw)
        expected = np.zeros((2, 2, 2, 2))
        for idx in [(0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0)]:
            expected[idx] = 0.25
        np.testing.assert_allclose(out, expected, atol=1e-15)

    def test_rejects_nonfinite_naming_index(self):
        raw = np.zeros((2, 2, 2, 2))
        raw[1, 0, 1, 1] = np.nan
        with pytest.raises(ValueError, match=r"\(1, 0, 1, 1\)"):
            symmetrize(raw)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            symmetrize(np.zeros((2, 2, 2)))

    def test_permutation_invariance_exact(self):
        t = random_symmetric(4)
        for perm in [(1, 0, 2, 3), (3, 2, 1, 0), (2, 0, 3, 1)]:
            np.testing.assert_array_equal(t.transpose(perm), t)


class TestFlatten:
    def test_known_first_row(self):
        # Printed to four decimals in the worked reference.
        t = build_exact_tensor(KNOWN_2D_TERMS)
        m = flatten(t)
        np.testing.assert_allclose(m[0], [2.0001, 0.0010, 0.0010, 0.0099], atol=5e-5)

    def test_rank_one_flattens_to_outer_square(self):
        b = np.array([0.6, 0.8])
        m = flatten(rank_one(b))
        vec = np.outer(b, b).ravel()
        np.testing.assert_allclose(m, np.outer(vec, vec), atol=1e-15)

    def test_zero_tensor(self):
        np.testing.assert_array_equal(flatten(np.zeros((3,) * 4)), np.zeros((9, 9)))

    def test_flattening_is_symmetric(self):
        m = flatten(random_symmetric(3))
        assert np.max(np.abs(m - m.T)) == 0.0

    def test_index_convention(self):
        t = random_symmetric(3)
        m = flatten(t)
        assert m[1 * 3 + 2, 0 * 3 + 1] == t[1, 2, 0, 1]


class TestReshapeVec:
    def test_round_trip_of_vectorized_outer(self):
        b = np.array([0.6, 0.0, 0.8])
        np.testing.assert_array_equal(reshape_vec(np.outer(b, b).ravel()), np.outer(b, b))

    def test_row_major_definition(self):
        np.testing.assert_array_equal(reshape_vec(np.array([1.0, 2, 3, 4])), [[1, 2], [3, 4]])

    def test_known_eigenvector_reshapes_symmetric_with_expected_top_eigenvalue(self):
        t = build_exact_tensor(KNOWN_2D_TERMS)
        spectral = sym_eig(flatten(t))
        m1 = reshape_vec(spectral.vectors[:, 0])
        np.testing.assert_allclose(m1, m1.T, atol=1e-8)
        assert abs(sym_eig(m1).values[0] - 0.99995) < 1e-4

    def test_eigenvector_reshape_symmetric_for_random_tensors(self):
        spectral = sym_eig(flatten(random_symmetric(4)))
        for k in range(len(spectral)):
            m = reshape_vec(spectral.vectors[:, k])
            np.testing.assert_allclose(m, m.T, atol=1e-8)

    def test_wrong_length(self):
        with pytest.raises(ValueError):
            reshape_vec(np.arange(5.0))


class TestSubtractRankOnes:
    def test_subtracting_own_decomposition_gives_zero(self):
        vecs = [np.array([1.0, 0, 0]), np.array([0, 0.6, 0.8])]
        terms = [(2.0, vecs[0]), (-1.0, vecs[1])]
        t = build_exact_tensor(terms)
        np.testing.assert_allclose(subtract_rank_ones(t, terms), 0, atol=1e-10)

    def test_empty_list_is_identity(self):
        t = random_symmetric(2)
        np.testing.assert_array_equal(subtract_rank_ones(t, []), t)

    def test_removing_one_term_leaves_the_other(self):
        a = np.array([1.0, 0, 0])
        b = np.array([0, 1.0, 0])
        t = build_exact_tensor([(2.0, a), (3.0, b)])
        np.testing.assert_allclose(subtract_rank_ones(t, [(2.0, a)]),
                                   build_exact_tensor([(3.0, b)]), atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            subtract_rank_ones(random_symmetric(3), [(1.0, np.ones(2))])


class TestContractions:
    def test_rank_one_at_its_own_vector(self):
        b = np.array([0.6, 0.8, 0.0])
        t = rank_one(b)
        assert abs(quad_form(t, b) - 1.0) < 1e-12
        np.testing.assert_allclose(contract3(t, b), b, atol=1e-12)

    def test_orthogonal_vector_annihilates(self):
        b = np.array([0.6, 0.8])
        x = np.array([-0.8, 0.6])
        assert abs(quad_form(rank_one(b), x)) < 1e-14
        np.testing.assert_allclose(contract3(rank_one(b), x), 0, atol=1e-14)

    def test_matches_quadruple_loop_oracle(self):
        # Direct O(p^4) evaluation of both contractions.
        rng = np.random.default_rng(7)
        for _ in range(100):
            p = int(rng.integers(2, 5))
            t = symmetrize(rng.standard_normal((p,) * 4))
            x = rng.standard_normal(p)
            brute_q = 0.0
            brute_c = np.zeros(p)
            for i in range(p):
                for j in range(p):
                    for k in range(p):
                        for l in range(p):
                            brute_c[i] += t[i, j, k, l] * x[j] * x[k] * x[l]
                            brute_q += t[i, j, k, l] * x[i] * x[j] * x[k] * x[l]
            assert abs(quad_form(t, x) - brute_q) < 1e-12 * max(1.0, abs(brute_q))
            np.testing.assert_allclose(contract3(t, x), brute_c, atol=1e-12)

    def test_quad_form_is_contract3_inner_product(self):
        t = random_symmetric(3)
        x = np.array([0.3, -1.2, 0.5])
        assert abs(quad_form(t, x) - contract3(t, x) @ x) < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            contract3(random_symmetric(3), np.ones(4))


class TestSymEig:
    def test_identity_reconstruction(self):
        spectral = sym_eig(np.eye(4))
        np.testing.assert_allclose(spectral.values, 1.0)
        np.testing.assert_allclose(spectral.reconstruct(), np.eye(4), atol=1e-12)

    def test_known_two_term_eigenvalues(self):
        t = build_exact_tensor(KNOWN_2D_TERMS)
        spectral = sym_eig(flatten(t))
        assert abs(spectral.values[0] - 2.00019) < 1e-3
        assert abs(spectral.values[1] - 0.99977) < 1e-3

    def test_magnitude_sorting(self):
        spectral = sym_eig(np.diag([3.0, -5.0, 1.0]))
        np.testing.assert_allclose(spectral.values, [-5.0, 3.0, 1.0])

    def test_orthonormality_and_reconstruction(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            m = rng.standard_normal((6, 6))
            m = m + m.T
            spectral = sym_eig(m)
            gram = spectral.vectors.T @ spectral.vectors
            np.testing.assert_allclose(gram, np.eye(6), atol=1e-10)
            scale = max(1.0, np.linalg.norm(m))
            assert np.linalg.norm(spectral.reconstruct() - m) <= 1e-8 * scale

    def test_sign_convention(self):
        spectral = sym_eig(np.diag([2.0, 1.0]))
        for k in range(2):
            v = spectral.vectors[:, k]
            assert v[np.argmax(np.abs(v))] > 0

    def test_rejects_nonsquare_and_asymmetric(self):
        with pytest.raises(ValueError):
            sym_eig(np.zeros((2, 3)))
        m = np.array([[1.0, 1.0], [0.0, 1.0]])
        with pytest.raises(ValueError, match="not symmetric"):
            sym_eig(m)

    def test_truncate_numerical_rank(self):
        m = np.diag([4.0, 1.0, 1e-14])
        spectral = sym_eig(m)
        assert spectral.numerical_rank() == 2
        thin = spectral.truncate()
        assert len(thin) == 2
        assert len(spectral.truncate(rank=1)) == 1


class TestCanonicalSign:
    def test_flips_negative_peak(self):
        np.testing.assert_array_equal(canonical_sign(np.array([0.1, -0.9])), [-0.1, 0.9])

    def test_tie_broken_by_lowest_index(self):
        v = np.array([-0.5, 0.5])
        out = canonical_sign(v)
        assert out[0] == 0.5


class TestDecomposition:
    def test_sorted_by_weight_magnitude_and_signed(self):
        d = Decomposition.from_terms([(1.0, [0.0, -1.0]), (-3.0, [1.0, 0.0])])
        np.testing.assert_allclose(d.weights, [-3.0, 1.0])
        assert d.vectors[1, 1] == 1.0  # sign flipped

    def test_zero_weights_dropped(self):
        d = Decomposition.from_terms([(0.0, [1.0, 0.0]), (2.0, [0.0, 1.0])])
        assert len(d) == 1

    def test_to_tensor_round_trip(self):
        terms = [(2.0, np.array([1.0, 0, 0])), (-1.5, np.array([0, 0.6, 0.8]))]
        d = Decomposition.from_terms(terms)
        np.testing.assert_allclose(d.to_tensor(), build_exact_tensor(terms), atol=1e-12)


class TestSerialization:
    def test_round_trip_exact(self, tmp_path):
        t = random_symmetric(3)
        path = tmp_path / "t.txt"
        save_symtensor4(path, t)
        np.testing.assert_array_equal(load_symtensor4(path), t)

    def test_header_format(self, tmp_path):
        path = tmp_path / "t.txt"
        save_symtensor4(path, random_symmetric(2))
        assert path.read_text().splitlines()[0] == "symtensor4 p=2"

    def test_rejects_bad_header_and_count(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("wrong header\n1 2 3\n")
        with pytest.raises(ValueError, match="header"):
            load_symtensor4(path)
        path.write_text("symtensor4 p=2\n1 2 3\n")
        with pytest.raises(ValueError, match="expected 16"):
            load_symtensor4(path)
