import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specfn.linalg import (BackendError, DimensionError, DomainError, Frobenius, KyFan,
                           Operator, PartialIsometry, RankOne, Schatten, Trace, adjoint,
                           basis_vector, compact_svd, conjugate_matrix, haar_unitary, inner,
                           is_normal, is_unitary, load_matrix, matrix_from_json,
                           matrix_to_json, matrix_unit, parse_norm, random_matrix,
                           random_normal_matrix, random_vector, rank_one, rank_one_apply,
                           right_support_partial_isometry, save_matrix, skew_product,
                           spectral_data, unitary_invariant_norm, vector_from_json,
                           vector_to_json)

NORMS = [Operator(), Schatten(1), Schatten(2), Schatten(3.5), Schatten(math.inf),
         KyFan(1), KyFan(2), Trace(), Frobenius()]


def e(n, i):
    return basis_vector(n, i)


class TestRankOne:
    def test_basis_action(self):
        r = RankOne(e(3, 0), e(3, 1))
        np.testing.assert_allclose(rank_one_apply(r, e(3, 1)), e(3, 0))
        np.testing.assert_allclose(rank_one_apply(r, e(3, 0)), 0)

    def test_unit_right_factor_returns_left(self, rng):
        x = random_vector(4, rng)
        f = random_vector(4, rng)
        f /= np.linalg.norm(f)
        np.testing.assert_allclose(RankOne(x, f).apply(f), x, atol=1e-14)

    def test_matrix_entries(self):
        x = np.array([1, 2j, 3])
        f = np.array([1j, 1, 0])
        M = rank_one(x, f)
        assert M[1, 0] == x[1] * np.conj(f[0])
        z = np.array([0.5, -1, 2j])
        np.testing.assert_allclose(M @ z, inner(z, f) * x)

    def test_inner_is_conjugate_linear_in_second(self):
        x, y = np.array([1, 0]), np.array([1j, 0])
        assert inner(x, y) == -1j
        assert inner(y, x) == 1j

    def test_adjoint_swaps_factors(self, rng):
        r = RankOne(random_vector(3, rng), random_vector(3, rng))
        np.testing.assert_allclose(r.adjoint().to_matrix(), adjoint(r.to_matrix()))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            RankOne(e(3, 0), e(4, 0))
        with pytest.raises(DimensionError):
            rank_one_apply(RankOne(e(3, 0), e(3, 1)), e(4, 0))


class TestSkewProduct:
    def test_identity(self, rng):
        B = random_matrix(3, rng)
        np.testing.assert_allclose(skew_product(np.eye(3), B), B)

    def test_rank_one_formula(self, rng):
        for n in (3, 5, 8):
            x, f, y, g = (random_vector(n, rng) for _ in range(4))
            lhs = skew_product(rank_one(x, f), rank_one(y, g))
            rhs = inner(y, x) * rank_one(f, g)
            assert np.linalg.norm(lhs - rhs) <= 1e-12 * np.linalg.norm(rhs)

    def test_orthogonal_left_factors(self, rng):
        g = random_vector(3, rng)
        assert np.all(skew_product(rank_one(e(3, 0), e(3, 0)), rank_one(e(3, 1), g)) == 0)

    def test_shape_mismatch(self):
        with pytest.raises(DimensionError):
            skew_product(np.eye(3), np.eye(4))


class TestConjugate:
    def test_examples(self, rng):
        A = rng.standard_normal((3, 3))
        np.testing.assert_array_equal(conjugate_matrix(A), A)
        Z = random_matrix(3, rng)
        np.testing.assert_array_equal(conjugate_matrix(conjugate_matrix(Z)), Z)
        np.testing.assert_array_equal(conjugate_matrix(1j * matrix_unit(2, 0, 1)),
                                      -1j * matrix_unit(2, 0, 1))

    @pytest.mark.parametrize("kind", NORMS, ids=repr)
    def test_norms_invariant(self, kind, rng):
        A = random_matrix(4, rng)
        assert unitary_invariant_norm(conjugate_matrix(A), kind) == pytest.approx(
            unitary_invariant_norm(A, kind), rel=1e-12)


class TestNorms:
    def test_examples(self, rng):
        x, f = random_vector(3, rng), random_vector(3, rng)
        assert unitary_invariant_norm(rank_one(x, f), Operator()) == pytest.approx(
            np.linalg.norm(x) * np.linalg.norm(f), rel=1e-12)
        assert unitary_invariant_norm(np.eye(3), Schatten(2)) == pytest.approx(math.sqrt(3))
        assert unitary_invariant_norm(np.diag([3, 2, 1]), KyFan(2)) == pytest.approx(5)

    def test_aliases(self, rng):
        A = random_matrix(4, rng)
        assert unitary_invariant_norm(A, Schatten(math.inf)) == unitary_invariant_norm(A)
        assert unitary_invariant_norm(A, KyFan(9)) == pytest.approx(
            unitary_invariant_norm(A, Trace()))
        assert unitary_invariant_norm(A, Schatten(2)) == pytest.approx(
            unitary_invariant_norm(A, Frobenius()))

    def test_large_p_does_not_overflow(self):
        assert unitary_invariant_norm(np.diag([1e200, 1e200, 0]), Schatten(50)) == \
            pytest.approx(1e200 * 2 ** (1 / 50))

    def test_parse(self):
        assert parse_norm("schatten:3") == Schatten(3.0)
        assert parse_norm("KyFan:2") == KyFan(2)
        assert parse_norm("trace") == Trace()
        with pytest.raises(DomainError):
            parse_norm("nuclear-ish")
        with pytest.raises(DomainError):
            Schatten(0.5)
        with pytest.raises(DomainError):
            KyFan(0)

    @pytest.mark.parametrize("kind", NORMS, ids=repr)
    def test_unitary_invariance(self, kind, rng):
        for n in (3, 5):
            A = random_matrix(n, rng)
            U, V = haar_unitary(n, rng), haar_unitary(n, rng)
            assert abs(unitary_invariant_norm(U @ A @ V, kind)
                       - unitary_invariant_norm(A, kind)) <= 1e-10


class TestPartialIsometry:
    def test_unitary_input(self, rng):
        U = haar_unitary(3, rng)
        W = right_support_partial_isometry(U, np.eye(3)).matrix
        assert is_unitary(W)

    def test_rank_one(self):
        W = right_support_partial_isometry(matrix_unit(3, 0, 0), np.eye(3))
        np.testing.assert_allclose(W.initial_projection, matrix_unit(3, 0, 0), atol=1e-14)
        np.testing.assert_allclose(np.linalg.svd(W.matrix, compute_uv=False), [1, 0, 0],
                                   atol=1e-14)

    def test_zero(self):
        W = right_support_partial_isometry(np.zeros((3, 3)), np.eye(3))
        assert W.matrix.shape == (3, 3) and not W.matrix.any()

    @pytest.mark.parametrize("rank", [1, 2, 3, 4])
    def test_support_projection(self, rank, rng):
        A = random_matrix(4, rng, rank=rank)
        W = right_support_partial_isometry(A, haar_unitary(4, rng)).matrix
        P, s, Q = compact_svd(A)
        proj = Q @ adjoint(Q)
        assert np.linalg.norm(adjoint(W) @ W - proj, 2) <= 1e-10
        assert np.linalg.norm(A @ adjoint(W) @ W - A, 2) <= 1e-10 * max(1, s[0])

    def test_target_too_small(self, rng):
        T = haar_unitary(4, rng)[:, :1]
        with pytest.raises(DomainError):
            right_support_partial_isometry(random_matrix(4, rng), T)

    def test_rejects_non_partial_isometry(self):
        with pytest.raises(DomainError):
            PartialIsometry(np.diag([1.0, 0.5, 0]))


class TestSpectralData:
    def test_diag(self):
        sd = spectral_data(np.diag([1, 2, 3]))
        np.testing.assert_allclose(np.sort(sd.eigenvalues.real), [1, 2, 3])
        np.testing.assert_allclose(sd.singular_values, [3, 2, 1])

    def test_rank_one_and_unitary(self, rng):
        x, f = random_vector(4, rng), random_vector(4, rng)
        s = spectral_data(rank_one(x, f)).singular_values
        np.testing.assert_allclose(s, [np.linalg.norm(x) * np.linalg.norm(f), 0, 0, 0],
                                   atol=1e-12)
        np.testing.assert_allclose(spectral_data(haar_unitary(4, rng)).singular_values, 1,
                                   atol=1e-12)

    def test_jordan_block_passes_residual_check(self):
        # eigenvectors are degenerate but every returned pair has a tiny residual
        J = np.eye(6, k=1)
        sd = spectral_data(J)
        assert sd.singular_values[0] == pytest.approx(1)

    def test_backend_error_is_runtime_error(self):
        assert issubclass(BackendError, RuntimeError)


class TestRandom:
    def test_haar_is_unitary_and_seeded(self):
        a = haar_unitary(5, np.random.default_rng(1))
        b = haar_unitary(5, np.random.default_rng(1))
        assert is_unitary(a)
        np.testing.assert_array_equal(a, b)

    def test_haar_first_moment(self):
        # E[U] = 0 and E|U_11|^2 = 1/n under Haar measure
        rng = np.random.default_rng(3)
        Us = np.stack([haar_unitary(3, rng) for _ in range(4000)])
        assert abs(Us[:, 0, 0].mean()) < 0.03
        assert np.mean(np.abs(Us[:, 0, 0]) ** 2) == pytest.approx(1 / 3, abs=0.02)

    def test_normal_and_rank(self, rng):
        assert is_normal(random_normal_matrix(4, rng), 1e-10)
        assert np.linalg.matrix_rank(random_matrix(5, rng, rank=2)) == 2


class TestJson:
    def test_round_trip(self, tmp_path, rng):
        A = random_matrix(3, rng)
        save_matrix(tmp_path / "a.json", A)
        np.testing.assert_array_equal(load_matrix(tmp_path / "a.json"), A)
        x = random_vector(3, rng)
        np.testing.assert_array_equal(vector_from_json(json.loads(json.dumps(
            vector_to_json(x)))), x)

    def test_format(self):
        obj = matrix_to_json(np.array([[1, 2j], [0, -1]]))
        assert obj == {"dim": 2, "rows": [[[1.0, 0.0], [0.0, 2.0]], [[0.0, 0.0], [-1.0, 0.0]]]}

    @pytest.mark.parametrize("obj", [
        {"rows": [[[1, 0]]]},
        {"dim": 1, "rows": [[1]]},
        {"dim": 2, "rows": [[[1, 0]]]},
        {"dim": 1, "rows": [[["a", 0]]]},
    ])
    def test_malformed(self, obj):
        with pytest.raises(ValueError):
            matrix_from_json(obj)

    def test_non_finite_rejected(self):
        with pytest.raises(DomainError):
            matrix_from_json({"dim": 1, "rows": [[[float("nan"), 0]]]})

    def test_invalid_file(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text("{")
        with pytest.raises(DomainError):
            load_matrix(p)


finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


@settings(max_examples=60, deadline=None)
@given(st.integers(3, 6), st.integers(0, 2**32 - 1))
def test_skew_product_matches_adjoint_product(n, seed):
    r = np.random.default_rng(seed)
    A, B = random_matrix(n, r), random_matrix(n, r)
    np.testing.assert_allclose(skew_product(A, B), np.conj(A).T @ B, rtol=0, atol=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(finite, finite), min_size=3, max_size=3),
       st.lists(st.tuples(finite, finite), min_size=3, max_size=3))
def test_rank_one_operator_norm(xs, fs):
    x = np.array([a + 1j * b for a, b in xs])
    f = np.array([a + 1j * b for a, b in fs])
    expected = np.linalg.norm(x) * np.linalg.norm(f)
    assert unitary_invariant_norm(rank_one(x, f)) == pytest.approx(expected, rel=1e-10,
                                                                   abs=1e-12)
