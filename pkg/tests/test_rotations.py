import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from smplid import InvalidInputError, cross, mat_log, rodrigues

RNG = np.random.default_rng(7)


def random_axis_angles(n, max_angle=np.pi - 1e-4, min_angle=0.0):
    v = RNG.normal(size=(n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    angles = RNG.uniform(min_angle, max_angle, size=(n, 1))
    return v * angles


class TestRodrigues:
    def test_zero_rotation_is_exact_identity(self):
        r = rodrigues(np.zeros(3))
        assert np.array_equal(r, np.eye(3))

    def test_quarter_turn_about_z(self):
        r = rodrigues(np.array([0.0, 0.0, np.pi / 2]))
        assert np.allclose(r @ np.array([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0], atol=1e-12)

    def test_orthonormal_with_unit_determinant(self):
        aa = random_axis_angles(200, max_angle=np.pi)
        r = rodrigues(aa)
        eye = np.eye(3)
        assert np.abs(np.swapaxes(r, -1, -2) @ r - eye).max() < 1e-12
        assert np.abs(np.linalg.det(r) - 1.0).max() < 1e-12

    def test_negation_transposes(self):
        aa = random_axis_angles(100, max_angle=np.pi)
        assert np.abs(rodrigues(-aa) - np.swapaxes(rodrigues(aa), -1, -2)).max() < 1e-12

    def test_small_angle_branch_continuous(self):
        for scale in (1e-10, 1e-8, 1e-7, 2e-7, 1e-6):
            aa = np.array([scale, -scale / 2, scale / 3])
            assert np.allclose(rodrigues(aa), Rotation.from_rotvec(aa).as_matrix(), atol=1e-15)

    def test_matches_quaternion_reference(self):
        aa = random_axis_angles(100)
        assert np.abs(rodrigues(aa) - Rotation.from_rotvec(aa).as_matrix()).max() < 1e-13

    def test_rejects_non_finite(self):
        with pytest.raises(InvalidInputError):
            rodrigues(np.array([np.nan, 0.0, 0.0]))


class TestMatLog:
    def test_identity_maps_to_zero(self):
        assert np.allclose(mat_log(np.eye(3)), np.zeros(3), atol=1e-15)

    def test_round_trip_from_rodrigues(self):
        assert np.allclose(mat_log(rodrigues(np.array([0.3, 0.0, 0.0]))), [0.3, 0.0, 0.0], atol=1e-12)

    def test_round_trip_random(self):
        aa = random_axis_angles(500, max_angle=np.pi - 1e-4, min_angle=1e-4)
        back = mat_log(rodrigues(aa))
        assert np.abs(back - aa).max() < 1e-8

    def test_near_pi_angle_recovered(self):
        aa = np.array([np.pi - 1e-4, 0.0, 0.0])
        got = mat_log(rodrigues(aa))
        ref = Rotation.from_matrix(rodrigues(aa)).as_rotvec()
        assert abs(np.linalg.norm(got) - (np.pi - 1e-4)) < 1e-6
        assert np.allclose(got, ref, atol=1e-6)

    def test_near_pi_random_axes_match_quaternion_oracle(self):
        axes = RNG.normal(size=(50, 3))
        axes /= np.linalg.norm(axes, axis=1, keepdims=True)
        for eps in (5e-5, 2e-5):
            aa = axes * (np.pi - eps)
            got = mat_log(rodrigues(aa))
            ref = Rotation.from_matrix(rodrigues(aa)).as_rotvec()
            assert np.abs(got - ref).max() < 1e-6

    def test_angle_canonical_range(self):
        aa = random_axis_angles(200, max_angle=np.pi)
        angles = np.linalg.norm(mat_log(rodrigues(aa)), axis=-1)
        assert np.all(angles <= np.pi + 1e-12)
        assert np.all(angles >= 0.0)

    def test_rejects_non_rotation(self):
        with pytest.raises(InvalidInputError):
            mat_log(np.eye(3) * 1.5)
        with pytest.raises(InvalidInputError):
            mat_log(np.diag([1.0, 1.0, -1.0]))


finite_vec = st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=3).map(np.array)


class TestCross:
    def test_unit_case(self):
        assert np.array_equal(cross([1.0, 0, 0], [0, 1.0, 0]), [0, 0, 1.0])

    def test_self_cross_is_zero(self):
        v = np.array([0.3, -1.2, 2.0])
        assert np.array_equal(cross(v, v), np.zeros(3))

    def test_scaled_case(self):
        assert np.allclose(cross([2.0, 0, 0], [0, 3.0, 0]), [0, 0, 6.0])

    @given(finite_vec, finite_vec)
    @settings(max_examples=50, deadline=None)
    def test_antisymmetric(self, a, b):
        assert np.allclose(cross(a, b), -cross(b, a), atol=1e-9)

    @given(finite_vec, finite_vec, finite_vec, st.floats(-10, 10, allow_nan=False))
    @settings(max_examples=50, deadline=None)
    def test_bilinear(self, a, b, c, s):
        lhs = cross(a, s * b + c)
        rhs = s * cross(a, b) + cross(a, c)
        assert np.allclose(lhs, rhs, atol=1e-6 * (1 + np.abs(rhs).max()))
