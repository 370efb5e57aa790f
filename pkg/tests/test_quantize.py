import numpy as np
import pytest

from classifier.quantize import (MIXED_SIGN, MeasurementMatrix, binarize, check_sign_matrix, gaussian_matrix,
                                 is_mixed_sign, mirrored_pair_matrix, mixed_sign_matrix)
from utils.exceptions import DimensionError


class TestGaussianMatrix:

    def test_shape_and_determinism(self):
        a = gaussian_matrix(6, 3, seed=7)
        b = gaussian_matrix(6, 3, seed=7)
        assert a.matrix.shape == (6, 3)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_rows_do_not_depend_on_matrix_height(self):
        short = gaussian_matrix(4, 3, seed=1)
        tall = gaussian_matrix(9, 3, seed=1)
        np.testing.assert_array_equal(short.matrix, tall.matrix[:4])

    def test_layers_use_independent_streams(self):
        assert not np.array_equal(gaussian_matrix(4, 3, 1, layer=0).matrix,
                                  gaussian_matrix(4, 3, 1, layer=1).matrix)

    def test_offsets_keep_normals(self, rng):
        x = rng.random((3, 20))
        plain = gaussian_matrix(5, 3, seed=2)
        shifted = gaussian_matrix(5, 3, seed=2, offsets_from=x)
        np.testing.assert_array_equal(plain.matrix, shifted.matrix)
        assert shifted.affine and not plain.affine
        assert shifted.offsets.shape == (5,)

    def test_matrix_is_read_only(self):
        a = gaussian_matrix(3, 2, seed=0)
        with pytest.raises(ValueError):
            a.matrix[0, 0] = 1.0

    @pytest.mark.parametrize("m,n", [(0, 3), (3, 0), (-1, 2)])
    def test_invalid_dimension(self, m, n):
        with pytest.raises(DimensionError):
            gaussian_matrix(m, n, seed=0)

    def test_entries_are_standard_normal(self):
        entries = gaussian_matrix(20_000, 5, seed=11).matrix.ravel()
        assert entries.mean() == pytest.approx(0.0, abs=0.02)
        assert entries.var() == pytest.approx(1.0, abs=0.02)


class TestMixedSign:

    def test_every_row_has_both_signs(self):
        a = mixed_sign_matrix(200, 2, seed=3)
        assert a.kind == MIXED_SIGN
        assert np.all(is_mixed_sign(a.matrix))

    def test_single_column_rejected(self):
        with pytest.raises(DimensionError):
            mixed_sign_matrix(5, 1, seed=0)

    def test_constructor_rejects_same_sign_row(self):
        with pytest.raises(DimensionError):
            MeasurementMatrix(np.array([[1.0, -1.0], [1.0, 2.0]]), MIXED_SIGN)

    def test_separates_axis_point_masses(self):
        """(a, 0) and (0, a) land on opposite sides of every mixed-sign hyperplane through 0"""
        a = mixed_sign_matrix(50, 2, seed=4)
        codes = binarize(a, np.array([[0.3, 0.0], [0.0, 0.3]]))
        assert np.all(codes[:, 0] != codes[:, 1])

    @pytest.mark.parametrize("g", [2, 3])
    def test_first_draw_kept_when_mixed(self, g):
        """Row i is the raw Gaussian row whenever that row already has both signs"""
        raw = gaussian_matrix(10_000, g, seed=5, layer=1).matrix
        kept = is_mixed_sign(raw)
        assert kept.mean() == pytest.approx(1 - 2.0 ** (1 - g), abs=0.02)
        conditioned = mixed_sign_matrix(10_000, g, seed=5, layer=1).matrix
        np.testing.assert_array_equal(conditioned[kept], raw[kept])

    @pytest.mark.parametrize("g", [3, 5])
    def test_conditioned_rows_stay_centered(self, g):
        rows = mixed_sign_matrix(10_000, g, seed=6).matrix
        np.testing.assert_allclose(rows.mean(axis=0), 0.0, atol=0.04)
        np.testing.assert_allclose((rows > 0).mean(axis=0), 0.5, atol=0.02)
        # magnitudes are independent of signs, so they stay half-normal
        assert np.abs(rows).mean() == pytest.approx(np.sqrt(2 / np.pi), abs=0.02)

    def test_two_columns_have_opposite_signs(self):
        rows = mixed_sign_matrix(2_000, 2, seed=7).matrix
        assert np.all(rows[:, 0] * rows[:, 1] < 0)
        assert (rows[:, 0] > 0).mean() == pytest.approx(0.5, abs=0.04)


class TestMirroredPairs:

    def test_pairs_are_reflections(self):
        a = mirrored_pair_matrix(10, seed=5).matrix
        np.testing.assert_array_equal(a[1::2], a[0::2, ::-1])

    def test_odd_count_rejected(self):
        with pytest.raises(DimensionError):
            mirrored_pair_matrix(7, seed=0)


class TestBinarize:

    def test_sign_of_zero_is_plus_one(self):
        a = MeasurementMatrix(np.array([[1.0, 0.0], [0.0, -1.0]]))
        codes = binarize(a, np.array([0.0, 5.0]))
        np.testing.assert_array_equal(codes, [1, -1])
        assert codes.dtype == np.int8

    def test_matrix_input(self):
        a = MeasurementMatrix(np.array([[1.0, -1.0]]))
        codes = binarize(a, np.array([[2.0, 1.0, 3.0], [1.0, 2.0, 3.0]]))
        np.testing.assert_array_equal(codes, [[1, -1, 1]])

    def test_affine_offsets(self):
        a = MeasurementMatrix(np.array([[1.0, 0.0]]), offsets=np.array([2.0]))
        np.testing.assert_array_equal(binarize(a, np.array([[1.0, 3.0], [0.0, 0.0]])), [[-1, 1]])

    def test_scale_invariance(self, rng):
        a = gaussian_matrix(20, 4, seed=6)
        x = rng.random((4, 30))
        np.testing.assert_array_equal(binarize(a, x), binarize(a, 3.5 * x))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            binarize(gaussian_matrix(3, 2, seed=0), np.zeros((3, 4)))


class TestCheckSignMatrix:

    def test_accepts_signs(self):
        assert check_sign_matrix([[1, -1], [-1, 1]]).dtype == np.int8

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            check_sign_matrix([[1, 0]])

    def test_row_count(self):
        with pytest.raises(DimensionError):
            check_sign_matrix(np.ones((3, 2)), rows=2)
