import numpy as np
import pytest

from smplid import (
    ConfigurationError,
    JOINT_NAMES,
    build_segment_params,
    default_bsp_table,
    default_skeleton,
    load_bsp_table,
    rodrigues,
    save_bsp_table,
    world_inertia,
)

J = {n: i for i, n in enumerate(JOINT_NAMES)}


class TestBuildSegmentParams:
    def test_masses_sum_to_total(self):
        sk = default_skeleton(75.0, 1.75)
        par = build_segment_params(sk)
        assert abs(par.mass.sum() - 75.0) < 1e-9

    def test_thigh_mass_matches_table_row(self):
        sk = default_skeleton(75.0, 1.75)
        par = build_segment_params(sk)
        frac = default_bsp_table()["left_hip"].mass_fraction
        assert par.mass[J["left_hip"]] == pytest.approx(frac * 75.0, rel=1e-9)
        assert frac == 0.1416  # de Leva male thigh

    def test_one_leg_fraction_physiological(self):
        # Thigh + shank + foot: the source table gives ~0.20 of body mass;
        # anything in the 0.12-0.25 band keeps the proximal-mass hierarchy.
        sk = default_skeleton()
        par = build_segment_params(sk)
        leg = par.mass[[J["left_hip"], J["left_knee"], J["left_foot"]]].sum() / sk.total_mass
        assert 0.12 <= leg <= 0.25

    def test_inertias_positive_semidefinite(self):
        sk = default_skeleton()
        par = build_segment_params(sk)
        for i in range(24):
            eig = np.linalg.eigvalsh(par.inertia_local[i])
            assert eig.min() >= -1e-12

    def test_doubling_mass_doubles_masses_and_inertias(self):
        p1 = build_segment_params(default_skeleton(75.0, 1.75))
        p2 = build_segment_params(default_skeleton(150.0, 1.75))
        assert np.allclose(p2.mass, 2.0 * p1.mass)
        assert np.allclose(p2.inertia_local, 2.0 * p1.inertia_local)

    def test_com_between_joint_and_child(self):
        sk = default_skeleton()
        par = build_segment_params(sk)
        for i in range(24):
            if not sk.children[i]:
                continue
            bone = sk.offsets[sk.children[i][0]]
            L = np.linalg.norm(bone)
            if L == 0:
                continue
            along = par.com_offset[i] @ bone / L
            assert -1e-12 <= along <= L + 1e-12
            # CoM lies on the bone axis
            assert np.linalg.norm(par.com_offset[i] - along * bone / L) < 1e-12

    def test_bad_sum_raises(self):
        table = default_bsp_table()
        table["pelvis"] = type(table["pelvis"])(0.5, 0.5, (0.6, 0.5, 0.5))
        with pytest.raises(ConfigurationError):
            build_segment_params(default_skeleton(), table)

    def test_renormalization_recorded(self):
        sk = default_skeleton()
        par = build_segment_params(sk)
        assert par.renorm_correction == pytest.approx(1.0, abs=1e-3)

    def test_json_round_trip(self, tmp_path):
        path = tmp_path / "bsp.json"
        save_bsp_table(default_bsp_table(), path)
        table = load_bsp_table(path)
        par = build_segment_params(default_skeleton(), table)
        ref = build_segment_params(default_skeleton())
        assert np.allclose(par.mass, ref.mass)
        assert np.allclose(par.inertia_local, ref.inertia_local)


class TestWorldInertia:
    def test_identity_rotation_is_noop(self):
        i_loc = np.diag([1.0, 2.0, 3.0])
        assert np.array_equal(world_inertia(i_loc, np.eye(3)), i_loc)

    def test_similarity_preserves_eigenvalues_and_symmetry(self):
        rng = np.random.default_rng(3)
        i_loc = np.diag([0.5, 1.0, 2.0])
        for _ in range(20):
            r = rodrigues(rng.normal(size=3))
            w = world_inertia(i_loc, r)
            assert np.allclose(w, w.T, atol=1e-12)
            assert np.allclose(np.sort(np.linalg.eigvalsh(w)), [0.5, 1.0, 2.0], atol=1e-12)

    def test_quarter_turn_permutes_principal_axes(self):
        r = rodrigues(np.array([0.0, 0.0, np.pi / 2]))
        w = world_inertia(np.diag([1.0, 2.0, 3.0]), r)
        assert np.allclose(w, np.diag([2.0, 1.0, 3.0]), atol=1e-12)
