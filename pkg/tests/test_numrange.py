import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import fixed_C
from specfn.linalg import (DomainError, basis_vector, haar_unitary, matrix_unit,
                           random_matrix, random_unit_vector, rank_one)
from specfn.numrange import (Condition, CWeight, QProfile, c_numerical_radius,
                             check_constancy_lemma, check_hausdorff_bound, check_lwq,
                             check_midpoint_convexity, classify_theorem41_condition,
                             conjugation_hypothesis, conjugation_symmetry_wc,
                             k_numerical_radius, normalize_q, numerical_radius, q_disc,
                             q_member, q_numerical_radius, q_profile, q_region)

# frozen brute-force values from tests/oracles.py
E12_DENSE = {0.0: 1.0, 0.3: 0.9769696007014754, 0.6: 0.8999999999876714,
             0.9: 0.7179449471729078, 1.0: 0.5}
WQ_SAMPLED = {
    (11, 3, 1): {0.0: 2.071994631794758, 0.5: 2.074466346021988, 0.8: 1.8745506886576602},
    (12, 4, 2): {0.0: 1.5411935269586858, 0.5: 1.4824480716443051, 0.8: 1.3539715385905473},
    (13, 5, 3): {0.0: 1.9479229099308462, 0.5: 2.0844494437116583, 0.8: 1.9214722679308298},
}
# derivative-free local maximisation, 30 Nelder-Mead starts (tests/oracles.py)
WQ_NELDER_MEAD = {
    (11, 3, 1): {0.0: 2.082087426383515, 0.5: 2.079993041307148, 0.8: 1.8887278588502805},
    (12, 4, 2): {0.0: 1.571338359310301, 0.5: 1.5162455942384585, 0.8: 1.3847904851142325},
    (13, 5, 3): {0.0: 2.059014489289128, 0.5: 2.155481615037015, 0.8: 2.0389092500793318},
}
WC_SAMPLED = {"diag(1,0,0)": 1.0519918830216486, "diag(1,.5,-.5)": 1.5535504443385637}
WC_NELDER_MEAD = {"diag(1,0,0)": 1.0661956327443207, "diag(1,.5,-.5)": 1.6186985215204932}


def e12_closed(q):
    return (1 + math.sqrt(1 - q * q)) / 2


@pytest.fixture
def E12_3():
    return matrix_unit(3, 0, 1)


class TestClassicalAndK:
    def test_numerical_radius_examples(self):
        assert numerical_radius(np.diag([2, -3])) == pytest.approx(3, abs=1e-10)
        assert numerical_radius(matrix_unit(2, 0, 1)) == pytest.approx(0.5, abs=1e-10)
        assert numerical_radius(np.eye(3)) == pytest.approx(1, abs=1e-10)

    def test_k_examples(self, rng, E12_3):
        assert k_numerical_radius(np.diag([3, 2, 1]), 2) == pytest.approx(5, abs=1e-10)
        A = random_matrix(4, rng)
        assert k_numerical_radius(A, 4) == pytest.approx(abs(np.trace(A)))
        assert k_numerical_radius(E12_3, 1) == pytest.approx(0.5, abs=1e-10)

    def test_k_range(self):
        with pytest.raises(DomainError):
            k_numerical_radius(np.eye(3), 0)
        with pytest.raises(DomainError):
            k_numerical_radius(np.eye(3), 4)

    def test_numerical_radius_bounds(self, rng):
        for _ in range(10):
            A = random_matrix(4, rng)
            w = numerical_radius(A)
            nrm = np.linalg.norm(A, 2)
            assert nrm / 2 - 1e-12 <= w <= nrm + 1e-12


class TestQDisc:
    def test_examples(self, rng):
        x = random_unit_vector(3, rng)
        d = q_disc(np.eye(3), x, 0.4)
        assert d.center == pytest.approx(0.4) and d.radius == pytest.approx(0, abs=1e-7)
        d = q_disc(matrix_unit(2, 0, 1), basis_vector(2, 1), 0)
        assert d.center == 0 and d.radius == pytest.approx(1)
        C = random_matrix(3, rng)
        d = q_disc(C, x, 1)
        assert d.radius == 0 and d.center == pytest.approx(np.vdot(x, C @ x))

    def test_rejects_non_unit_vector(self):
        with pytest.raises(DomainError):
            q_disc(np.eye(2), np.array([1.0, 1.0]), 0.5)

    def test_q_outside_unit_disc(self):
        with pytest.raises(DomainError):
            normalize_q(1.5)
        assert normalize_q(-0.5j) == (0.5, -1j)


class TestQRadius:
    @pytest.mark.parametrize("q", [0.0, 0.25, 0.5, 0.75, 1.0])
    def test_identity(self, q):
        assert q_numerical_radius(np.eye(3), q, rng=0) == pytest.approx(q, abs=1e-7)

    @pytest.mark.parametrize("q", sorted(E12_DENSE))
    def test_e12_closed_form_and_dense_oracle(self, q, E12_3):
        v = q_numerical_radius(E12_3, q, rng=1)
        assert v == pytest.approx(e12_closed(q), abs=1e-9)
        assert v == pytest.approx(E12_DENSE[q], abs=1e-9)

    @pytest.mark.parametrize("key", sorted(WQ_SAMPLED))
    def test_against_frozen_oracles(self, key):
        # random sampling only bounds from below; Nelder-Mead pins the value
        C = fixed_C(*key)
        for q, sampled in WQ_SAMPLED[key].items():
            v = q_numerical_radius(C, q, rng=2)
            assert v >= sampled - 1e-4
            assert v == pytest.approx(WQ_NELDER_MEAD[key][q], abs=1e-8)

    def test_restart_agreement(self, rng):
        C = random_matrix(5, rng, rank=3)
        vals = [q_numerical_radius(C, 0.4, rng=s) for s in range(4)]
        assert np.ptp(vals) <= 1e-8

    def test_phase_of_q_does_not_matter(self, rng):
        C = random_matrix(3, rng)
        a = q_numerical_radius(C, 0.6, rng=3)
        b = q_numerical_radius(C, 0.6 * np.exp(0.7j), rng=3)
        assert a == pytest.approx(b, abs=1e-9)

    def test_unitary_similarity_invariance(self, rng):
        C = random_matrix(4, rng)
        U = haar_unitary(4, rng)
        assert q_numerical_radius(U @ C @ U.conj().T, 0.3, rng=4) == pytest.approx(
            q_numerical_radius(C, 0.3, rng=4), abs=1e-8)

    def test_zero_matrix(self):
        assert q_numerical_radius(np.zeros((3, 3)), 0.5) == 0.0

    def test_q_one_is_numerical_radius(self, rng):
        C = random_matrix(4, rng)
        assert q_numerical_radius(C, 1.0, rng=5) == pytest.approx(numerical_radius(C), abs=1e-9)


class TestMembership:
    def test_examples(self, E12_3):
        ok, margin = q_member(np.eye(3), 0.3, 0.3, rng=0)
        assert ok and margin == pytest.approx(0, abs=1e-6)
        assert q_member(E12_3, 0, 0.99, rng=0)[0]
        assert not q_member(E12_3, 1, 0.6, rng=0)[0]

    def test_midpoint_example(self, E12_3):
        assert q_member(E12_3, 0.5, 0.75, rng=0)[0]
        assert not q_member(E12_3, 0.5, 0.95, rng=0)[0]

    def test_region_points_are_members(self, rng):
        C = random_matrix(3, rng)
        reg = q_region(C, 0.5, rng=rng, n_discs=50)
        for z in reg.points[::37]:
            assert q_member(C, 0.5, z, rng=rng)[0]

    def test_region_modulus_below_radius(self, rng):
        C = random_matrix(3, rng)
        reg = q_region(C, 0.5, rng=rng, n_discs=500)
        assert reg.max_modulus() <= q_numerical_radius(C, 0.5, rng=rng) + 1e-9
        assert len(reg.boundary) == 1


class TestCRadius:
    def test_hermitian_example(self):
        assert c_numerical_radius(np.diag([2, -3]), np.diag([1, 0])) == pytest.approx(3, abs=1e-10)

    def test_projection_reduces_to_k(self, rng):
        A = random_matrix(4, rng)
        P = np.diag([1, 1, 0, 0])
        assert c_numerical_radius(A, P) == pytest.approx(k_numerical_radius(A, 2), abs=1e-10)

    @pytest.mark.parametrize("key,C", [("diag(1,0,0)", np.diag([1.0, 0, 0])),
                                       ("diag(1,.5,-.5)", np.diag([1.0, 0.5, -0.5]))])
    def test_against_frozen_oracles(self, key, C):
        A = fixed_C(21, 3, 3)
        v = c_numerical_radius(A, C)
        assert v >= WC_SAMPLED[key] - 1e-4
        assert v == pytest.approx(WC_NELDER_MEAD[key], abs=1e-8)

    def test_rank_one_relation(self, rng):
        C = random_matrix(3, rng)
        x, f = random_unit_vector(3, rng) * 1.7, random_unit_vector(3, rng)
        A = rank_one(x, f)
        nrm = np.linalg.norm(A, 2)
        q = abs(np.trace(A)) / nrm
        wc = c_numerical_radius(A, C, rng=rng, restarts=32)
        assert wc == pytest.approx(nrm * q_numerical_radius(C, q, rng=rng), abs=1e-6)

    def test_sweep_and_ascent_agree_for_hermitian(self, rng):
        A = random_matrix(3, rng)
        M = random_matrix(3, rng)
        C = M + M.conj().T
        a = c_numerical_radius(A, C, method="sweep")
        b = c_numerical_radius(A, C, rng=rng, method="ascent")
        assert a == pytest.approx(b, abs=1e-5)

    def test_info_and_method_validation(self, rng):
        info = c_numerical_radius(np.eye(3), random_matrix(3, rng), rng=rng, return_info=True)
        assert info.method == "ascent" and info.lower_bound_only
        with pytest.raises(DomainError):
            c_numerical_radius(np.eye(3), random_matrix(3, rng), method="sweep")
        with pytest.raises(DomainError):
            c_numerical_radius(np.eye(3), np.eye(3), method="bogus")

    def test_weight_detects_hermitian(self):
        assert CWeight(np.diag([1, 2, 3])).hermitian
        assert not CWeight(matrix_unit(3, 0, 1)).hermitian


class TestProfiles:
    def test_identity_profile(self):
        prof = q_profile(np.eye(3), rng=0)
        np.testing.assert_allclose(prof.values, prof.q, atol=1e-7)
        assert prof.argmin == 0 and prof.argmax == 1
        assert prof.monotonicity(1e-6) == "increasing"

    def test_e12_profile(self, E12_3):
        prof = q_profile(E12_3, rng=0)
        np.testing.assert_allclose(prof.values, [e12_closed(q) for q in prof.q], atol=1e-9)
        assert prof.monotonicity() == "decreasing"

    def test_classify_examples(self, E12_3):
        assert classify_theorem41_condition(q_profile(E12_3, rng=0)) is Condition.ONE
        assert classify_theorem41_condition(q_profile(np.eye(3), rng=0)) is Condition.ONE
        assert classify_theorem41_condition(q_profile(np.zeros((3, 3)))) is Condition.NEITHER

    def test_classify_synthetic_profiles(self):
        q = np.linspace(0, 1, 21)
        assert classify_theorem41_condition(QProfile(q, 1 + q * (1 - q))) is Condition.TWO
        assert classify_theorem41_condition(QProfile(q, np.ones(21))) is Condition.NEITHER
        dip = 1 - q * (1 - q)
        assert classify_theorem41_condition(QProfile(q, dip)) is Condition.NEITHER

    def test_profile_validation(self):
        with pytest.raises(DomainError):
            QProfile(np.linspace(0, 1, 10), np.zeros(10))
        with pytest.raises(DomainError):
            QProfile(np.linspace(0, 0.9, 21), np.zeros(21))
        with pytest.raises(DomainError):
            q_profile(np.eye(3), grid_size=5)

    def test_csv(self):
        q = np.linspace(0, 1, 21)
        text = QProfile(q, q).to_csv()
        lines = text.splitlines()
        assert lines[0] == "q,w_q" and len(lines) == 22 and lines[-1] == "1.0,1.0"


class TestLemmaChecks:
    def test_lwq_e12_strict(self, E12_3):
        rep = check_lwq(E12_3, 0.5, 1.0, rng=0)
        assert rep.passed
        info = rep.check("lower_bound")
        assert info["wq"] == pytest.approx((1 + math.sqrt(0.75)) / 2, abs=1e-9)
        assert rep.check("strict")["asserted"]

    def test_lwq_identity(self):
        rep = check_lwq(np.eye(3), 0.3, 0.9, rng=0)
        assert rep.passed
        assert rep.check("lower_bound")["wq"] == pytest.approx(0.3, abs=1e-7)

    def test_lwq_argument_order(self):
        with pytest.raises(DomainError):
            check_lwq(np.eye(3), 0.8, 0.5)

    def test_hausdorff_examples(self, rng):
        C = random_matrix(4, rng, rank=2)
        rep = check_hausdorff_bound(C, 0.3, 0.3, rng=rng, n_discs=200)
        assert rep.passed and rep.check("hausdorff_bound")["estimate"] == 0
        rep = check_hausdorff_bound(np.eye(3), 0.0, 1.0, rng=rng, n_discs=100)
        assert rep.passed
        assert rep.check("hausdorff_bound")["estimate"] == pytest.approx(1, abs=1e-7)
        assert check_hausdorff_bound(C, 0.4, 0.5, rng=rng).passed

    def test_midpoint_examples(self, E12_3, rng):
        rep = check_midpoint_convexity(E12_3, 0.0, 1.0, rng=rng, points=[(1.0, 0.5)], ts=(0.5,))
        assert rep.passed
        assert rep.check("membership")["worst_margin"] >= 0
        assert check_midpoint_convexity(np.eye(3), 0.2, 0.9, rng=rng, draws=3).passed
        assert check_midpoint_convexity(random_matrix(3, rng), 0.1, 0.7, rng=rng, draws=4).passed

    @pytest.mark.parametrize("C,hyp", [
        (np.diag([1.0, 0, 0]), "rank-one normal"),
        (np.diag([1j, 0, 0]), "rank-one normal"),
        (np.array([[1, 2, 0], [2, -1, 0], [0, 0, 3]], dtype=float),
         "normal, spectrum closed under conjugation"),
    ])
    def test_conjugation_symmetry(self, rng, C, hyp):
        rep = conjugation_symmetry_wc(C, random_matrix(3, rng), rng=rng)
        assert rep.passed
        assert rep.check("w_C(X) = w_C(conj X)")["hypothesis"] == hyp

    def test_conjugation_hypothesis_absent(self):
        assert conjugation_hypothesis(matrix_unit(3, 0, 1)) is None
        assert conjugation_hypothesis(np.diag([1j, 2, 0])) is None

    def test_constancy_lemma_on_identity(self):
        # w_I(u (x) h) = |<u, h>|, so the premise fails for independent u, v
        rep = check_constancy_lemma(np.eye(3), rng=0, n_h=5)
        assert rep.passed
        assert not rep.check("premise")["holds"]


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 1), st.integers(0, 2**32 - 1))
def test_wq_between_disc_bounds(q, seed):
    r = np.random.default_rng(seed)
    C = random_matrix(3, r)
    v = q_numerical_radius(C, q, rng=r, restarts=16)
    x = random_unit_vector(3, r)
    d = q_disc(C, x, q)
    assert abs(d.center) + d.radius <= v + 1e-9
    assert v <= np.linalg.norm(C, 2) + 1e-9
