import numpy as np
import pytest

from smplid import (
    InvalidInputError,
    JOINT_NAMES,
    N_JOINTS,
    Pose,
    Skeleton,
    default_skeleton,
    fk_sequence,
    forward_kinematics,
    rodrigues,
)
from smplid.skeleton import TEMPLATE_OFFSETS

RNG = np.random.default_rng(11)


def zero_pose(trans=(0.0, 0.0, 0.0)):
    return Pose(root_orient=np.zeros(3), body=np.zeros((23, 3)), root_trans=np.asarray(trans, float))


def random_pose(scale=0.5, trans_scale=1.0):
    return Pose(
        root_orient=RNG.normal(0, scale, 3),
        body=RNG.normal(0, scale, (23, 3)),
        root_trans=RNG.normal(0, trans_scale, 3),
    )


class TestDefaultSkeleton:
    def test_template_scale_one(self):
        sk = default_skeleton(75.0, 1.75)
        assert np.array_equal(sk.offsets, TEMPLATE_OFFSETS)

    def test_double_height_doubles_offsets(self):
        sk = default_skeleton(75.0, 3.50)
        assert np.allclose(sk.offsets, 2.0 * TEMPLATE_OFFSETS)

    def test_topology_is_a_tree(self):
        sk = default_skeleton()
        assert sk.parent[0] == -1
        assert all(sk.parent[i] < i for i in range(1, N_JOINTS))
        assert len(sk.joint_names) == 24 and sk.joint_names == JOINT_NAMES

    def test_rejects_nonpositive_size(self):
        with pytest.raises(InvalidInputError):
            default_skeleton(0.0, 1.75)
        with pytest.raises(InvalidInputError):
            default_skeleton(75.0, -1.0)

    def test_json_round_trip(self, tmp_path):
        sk = default_skeleton(68.0, 1.62)
        path = tmp_path / "skel.json"
        sk.save(path)
        back = Skeleton.load(path)
        assert back.joint_names == sk.joint_names
        assert np.array_equal(back.offsets, sk.offsets)
        assert back.total_mass == sk.total_mass


class TestForwardKinematics:
    def test_rest_pose_accumulates_offsets(self):
        sk = default_skeleton()
        fk = forward_kinematics(sk, zero_pose())
        expected = np.zeros((N_JOINTS, 3))
        for i in range(1, N_JOINTS):
            expected[i] = expected[sk.parent[i]] + sk.offsets[i]
        assert np.allclose(fk.world_pos, expected, atol=1e-15)
        assert np.allclose(fk.world_rot, np.eye(3), atol=1e-15)

    def test_translation_equivariance(self):
        sk = default_skeleton()
        base = forward_kinematics(sk, zero_pose())
        shifted = forward_kinematics(sk, zero_pose(trans=(1.0, 2.0, 3.0)))
        assert np.allclose(shifted.world_pos, base.world_pos + np.array([1.0, 2.0, 3.0]), atol=1e-15)

    def test_bent_elbow_matches_manual_two_link_chain(self):
        # Rotate the left elbow a quarter turn and compose the wrist position
        # by hand from the two rigid transforms elbow->wrist.
        sk = default_skeleton()
        pose = zero_pose()
        elbow, wrist = JOINT_NAMES.index("left_elbow"), JOINT_NAMES.index("left_wrist")
        aa = np.array([0.0, np.pi / 2, 0.0])
        pose.body[elbow - 1] = aa  # body[] starts at joint 1
        fk = forward_kinematics(sk, pose)

        elbow_pos = np.zeros(3)
        i = elbow
        while i != -1:
            elbow_pos += sk.offsets[i]
            i = sk.parent[i]
        expected_wrist = elbow_pos + rodrigues(aa) @ sk.offsets[wrist]
        assert np.allclose(fk.world_pos[wrist], expected_wrist, atol=1e-12)
        assert np.allclose(fk.world_pos[elbow], elbow_pos, atol=1e-12)

    def test_rigidity_of_bone_lengths(self):
        sk = default_skeleton()
        for _ in range(10):
            fk = forward_kinematics(sk, random_pose())
            for i in range(1, N_JOINTS):
                d = np.linalg.norm(fk.world_pos[i] - fk.world_pos[sk.parent[i]])
                assert abs(d - np.linalg.norm(sk.offsets[i])) < 1e-9

    def test_global_rotation_equivariance(self):
        sk = default_skeleton()
        pose = random_pose()
        pose.root_trans = np.zeros(3)
        fk = forward_kinematics(sk, pose)

        g = np.array([0.4, -0.2, 0.9])
        rot = rodrigues(g)
        pre = Pose(
            root_orient=np.array(
                _compose_axis_angle(g, pose.root_orient), dtype=float
            ),
            body=pose.body.copy(),
            root_trans=np.zeros(3),
        )
        fk2 = forward_kinematics(sk, pre)
        assert np.allclose(fk2.world_pos, (rot @ fk.world_pos.T).T, atol=1e-9)
        assert np.allclose(fk2.world_rot, rot @ fk.world_rot, atol=1e-9)

    def test_pose_continuity(self):
        # Small pose perturbations move joints by no more than the total chain
        # length times the parameter change (loose Lipschitz bound).
        sk = default_skeleton()
        reach = np.linalg.norm(sk.offsets, axis=1).sum()
        for _ in range(10):
            p1 = random_pose()
            delta = RNG.normal(0, 1e-4, (23, 3))
            p2 = Pose(p1.root_orient.copy(), p1.body + delta, p1.root_trans.copy())
            d_pos = np.abs(forward_kinematics(sk, p2).world_pos - forward_kinematics(sk, p1).world_pos).max()
            d_par = np.linalg.norm(delta, axis=-1).sum()
            assert d_pos <= reach * d_par

    def test_sequence_shape_validation(self):
        sk = default_skeleton()
        with pytest.raises(InvalidInputError):
            fk_sequence(sk, np.zeros((5, 23, 3)), np.zeros((5, 3)))
        with pytest.raises(InvalidInputError):
            fk_sequence(sk, np.zeros((5, 24, 3)), np.zeros((4, 3)))
        bad = np.zeros((5, 24, 3))
        bad[2, 3, 1] = np.inf
        with pytest.raises(InvalidInputError):
            fk_sequence(sk, bad, np.zeros((5, 3)))


def _compose_axis_angle(a, b):
    from smplid import mat_log

    return mat_log(rodrigues(np.asarray(a)) @ rodrigues(np.asarray(b)))
