"""Spectral helpers: eigensystems, inertia, null/range spaces, pencils."""

from __future__ import annotations

import numpy as np
import pytest

from qrange import (
    Inertia,
    OutOfRange,
    PsdClass,
    ZeroMatrix,
    ZeroVector,
    apply_pseudoinverse,
    eigh,
    inertia,
    null_space_basis,
    pencil_dependence,
    psd_check,
    range_membership,
)

TOL_EIG = 1e-9
TOL_RANK = 1e-9
TOL_PSD = 1e-9
TOL_DEP = 1e-9


class TestEigh:
    def test_eigenvalues_ascending(self):
        sd = eigh(np.diag([3.0, -1.0, 2.0]))
        assert np.allclose(sd.eigenvalues, [-1.0, 2.0, 3.0])

    def test_reconstruction(self):
        rng = np.random.default_rng(2)
        m = rng.uniform(-1, 1, (5, 5))
        m = (m + m.T) / 2
        sd = eigh(m)
        assert np.allclose((sd.eigenvectors * sd.eigenvalues) @ sd.eigenvectors.T, m, atol=1e-12)

    def test_spectral_norm(self):
        sd = eigh(np.diag([-4.0, 1.0]))
        assert sd.spectral_norm == pytest.approx(4.0)

    def test_empty_matrix(self):
        sd = eigh(np.zeros((0, 0)))
        assert sd.eigenvalues.shape == (0,)
        assert sd.spectral_norm == 0.0


class TestInertia:
    def test_plain_counts(self):
        assert inertia(eigh(np.diag([-2.0, 0.0, 3.0])), TOL_EIG).as_tuple() == (1, 1, 1)

    def test_threshold_scales_with_norm(self):
        # 1e-6 is a zero next to a 1e6 eigenvalue, but not next to one of size 1
        big = inertia(eigh(np.diag([1e6, 1e-6])), TOL_EIG)
        assert big.as_tuple() == (0, 1, 1)
        small = inertia(eigh(np.diag([1.0, 1e-6])), TOL_EIG)
        assert small.as_tuple() == (0, 0, 2)

    def test_empty(self):
        assert inertia(eigh(np.zeros((0, 0))), TOL_EIG) == Inertia(0, 0, 0)


class TestPsdCheck:
    @pytest.mark.parametrize(
        "diag, expected",
        [
            ([1.0, 2.0], PsdClass.PSD),
            ([0.0, 2.0], PsdClass.PSD),
            ([-1.0, -3.0], PsdClass.NSD),
            ([0.0, -2.0], PsdClass.NSD),
            ([-1.0, 1.0], PsdClass.INDEFINITE),
            ([0.0, 0.0], PsdClass.ZERO),
        ],
    )
    def test_classification(self, diag, expected):
        assert psd_check(np.diag(diag), TOL_PSD) == expected

    def test_empty_is_zero(self):
        assert psd_check(np.zeros((0, 0)), TOL_PSD) == PsdClass.ZERO

    def test_tiny_negative_still_psd(self):
        assert psd_check(np.diag([1.0, -1e-12]), TOL_PSD) == PsdClass.PSD


class TestNullSpaceBasis:
    def test_columns_orthonormal_and_orthogonal_to_input(self):
        rng = np.random.default_rng(4)
        for n in (1, 2, 3, 6):
            c = rng.standard_normal(n)
            v = null_space_basis(c)
            assert v.shape == (n, n - 1)
            assert np.allclose(v.T @ v, np.eye(n - 1), atol=1e-12)
            assert np.allclose(c @ v, 0.0, atol=1e-12 * max(1.0, np.linalg.norm(c)))

    def test_deterministic(self):
        c = np.array([1.0, -2.0, 0.5])
        assert np.array_equal(null_space_basis(c), null_space_basis(c))

    def test_scale_invariant_subspace(self):
        c = np.array([1.0, -2.0, 0.5])
        v1 = null_space_basis(c)
        v2 = null_space_basis(1000.0 * c)
        assert np.allclose(v1, v2, atol=1e-12)

    def test_zero_vector_rejected(self):
        with pytest.raises(ZeroVector):
            null_space_basis(np.zeros(3))


class TestRangeMembership:
    def test_member_recovers_minimum_norm_solution(self):
        a_mat = np.diag([2.0, -3.0, 0.0])
        target = np.array([4.0, 3.0, 0.0])
        ok, y = range_membership(a_mat, target, TOL_RANK)
        assert ok
        assert np.allclose(a_mat @ y, target, atol=1e-12)
        assert y[2] == pytest.approx(0.0, abs=1e-14)

    def test_nonmember_detected(self):
        ok, y = range_membership(np.diag([1.0, 0.0]), np.array([0.0, 1.0]), TOL_RANK)
        assert not ok and y is None

    def test_zero_vector_always_member(self):
        ok, y = range_membership(np.zeros((2, 2)), np.zeros(2), TOL_RANK)
        assert ok
        assert np.allclose(y, 0.0)

    def test_rotated_rank_deficient(self):
        rng = np.random.default_rng(9)
        q, _ = np.linalg.qr(rng.standard_normal((4, 4)))
        a_mat = (q * np.array([1.5, -0.5, 0.0, 0.0])) @ q.T
        inside = a_mat @ rng.standard_normal(4)
        outside = inside + 0.3 * q[:, 3]
        assert range_membership(a_mat, inside, TOL_RANK)[0]
        assert not range_membership(a_mat, outside, TOL_RANK)[0]

    def test_accepts_precomputed_spectral_data(self):
        a_mat = np.diag([1.0, 0.0])
        sd = eigh(a_mat)
        ok, _ = range_membership(a_mat, np.array([1.0, 0.0]), TOL_RANK, spectral=sd)
        assert ok


class TestApplyPseudoinverse:
    def test_matches_pinv_on_range(self):
        rng = np.random.default_rng(12)
        q, _ = np.linalg.qr(rng.standard_normal((3, 3)))
        a_mat = (q * np.array([2.0, -1.0, 0.0])) @ q.T
        w = a_mat @ rng.standard_normal(3)
        expected = float(w @ np.linalg.pinv(a_mat) @ w)
        assert apply_pseudoinverse(a_mat, w, TOL_RANK) == pytest.approx(expected, abs=1e-10)

    def test_out_of_range_rejected(self):
        with pytest.raises(OutOfRange):
            apply_pseudoinverse(np.diag([1.0, 0.0]), np.array([0.0, 1.0]), TOL_RANK)

    def test_zero_vector(self):
        assert apply_pseudoinverse(np.diag([1.0, 0.0]), np.zeros(2), TOL_RANK) == 0.0


class TestPencilDependence:
    def test_exact_multiple(self):
        a_mat = np.diag([-1.0, 1.0])
        assert pencil_dependence(a_mat, 2.0 * a_mat, TOL_DEP) == pytest.approx(2.0, abs=1e-15)

    def test_zero_second_matrix_gives_ratio_zero(self):
        assert pencil_dependence(np.diag([-1.0, 1.0]), np.zeros((2, 2)), TOL_DEP) == 0.0

    def test_independent_pair_rejected(self):
        assert pencil_dependence(np.diag([1.0, 1.0]), np.diag([1.0, -1.0]), TOL_DEP) is None

    def test_negative_ratio(self):
        rng = np.random.default_rng(6)
        m = rng.uniform(-1, 1, (4, 4))
        m = (m + m.T) / 2
        assert pencil_dependence(m, -0.75 * m, TOL_DEP) == pytest.approx(-0.75, abs=1e-12)

    def test_zero_first_matrix_raises(self):
        with pytest.raises(ZeroMatrix):
            pencil_dependence(np.zeros((2, 2)), np.eye(2), TOL_DEP)

    def test_near_dependence_within_tolerance(self):
        a_mat = np.diag([1.0, 2.0])
        b_mat = 3.0 * a_mat + 1e-12 * np.array([[0.0, 1.0], [1.0, 0.0]])
        assert pencil_dependence(a_mat, b_mat, TOL_DEP) == pytest.approx(3.0, abs=1e-9)

    def test_above_tolerance_rejected(self):
        a_mat = np.diag([1.0, 2.0])
        b_mat = 3.0 * a_mat + 1e-6 * np.array([[0.0, 1.0], [1.0, 0.0]])
        assert pencil_dependence(a_mat, b_mat, TOL_DEP) is None

    def test_scale_free_acceptance(self):
        # the residual test is relative to the pencil scale, so a huge pair
        # with the same shape tolerance behaves like the unit pair
        a_mat = 1e8 * np.diag([1.0, 2.0])
        b_mat = 3.0 * a_mat + 1e-4 * np.array([[0.0, 1.0], [1.0, 0.0]])
        assert pencil_dependence(a_mat, b_mat, TOL_DEP) == pytest.approx(3.0, abs=1e-9)
