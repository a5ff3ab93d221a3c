"""The 24-joint SMPL kinematic tree and forward kinematics.

Coordinate convention: Y-up, right-handed, Z forward; gravity acts along -Y.
Joint order is the standard SMPL index order and is part of every file format
in this package.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ParseError
from .rotations import rodrigues

JOINT_NAMES = (
    "pelvis",
    "left_hip",
    "right_hip",
    "spine1",
    "left_knee",
    "right_knee",
    "spine2",
    "left_ankle",
    "right_ankle",
    "spine3",
    "left_foot",
    "right_foot",
    "neck",
    "left_collar",
    "right_collar",
    "head",
    "left_shoulder",
    "right_shoulder",
    "left_elbow",
    "right_elbow",
    "left_wrist",
    "right_wrist",
    "left_hand",
    "right_hand",
)

PARENTS = (-1, 0, 0, 0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 9, 9, 12, 13, 14, 16, 17, 18, 19, 20, 21)

N_JOINTS = 24

# Rest-pose bone vectors (child position in the parent frame, meters) for a
# 1.75 m subject in a T-pose.  These approximate the SMPL mean skeleton; the
# published model does not ship explicit bone lengths, so absolute values are
# only correct to the order of magnitude and are scaled linearly with subject
# height.
TEMPLATE_HEIGHT = 1.75
TEMPLATE_OFFSETS = np.array(
    [
        [0.000, 0.000, 0.000],  # pelvis (root)
        [0.090, -0.060, 0.000],  # left_hip
        [-0.090, -0.060, 0.000],  # right_hip
        [0.000, 0.105, 0.000],  # spine1
        [0.000, -0.380, 0.000],  # left_knee
        [0.000, -0.380, 0.000],  # right_knee
        [0.000, 0.135, 0.000],  # spine2
        [0.000, -0.400, 0.000],  # left_ankle
        [0.000, -0.400, 0.000],  # right_ankle
        [0.000, 0.055, 0.000],  # spine3
        [0.000, -0.060, 0.130],  # left_foot
        [0.000, -0.060, 0.130],  # right_foot
        [0.000, 0.210, 0.000],  # neck
        [0.080, 0.120, 0.000],  # left_collar
        [-0.080, 0.120, 0.000],  # right_collar
        [0.000, 0.090, 0.000],  # head
        [0.110, 0.040, 0.000],  # left_shoulder
        [-0.110, 0.040, 0.000],  # right_shoulder
        [0.260, 0.000, 0.000],  # left_elbow
        [-0.260, 0.000, 0.000],  # right_elbow
        [0.250, 0.000, 0.000],  # left_wrist
        [-0.250, 0.000, 0.000],  # right_wrist
        [0.080, 0.000, 0.000],  # left_hand
        [-0.080, 0.000, 0.000],  # right_hand
    ]
)

GRAVITY = np.array([0.0, -9.81, 0.0])


@dataclass(frozen=True)
class Skeleton:
    """Immutable 24-joint tree: names, parent indices, rest offsets, subject size."""

    joint_names: tuple[str, ...]
    parent: np.ndarray
    offsets: np.ndarray  # (24, 3) child position in parent frame, meters
    total_mass: float
    total_height: float
    children: tuple[tuple[int, ...], ...] = field(init=False)

    def __post_init__(self):
        if len(self.joint_names) != N_JOINTS or self.offsets.shape != (N_JOINTS, 3):
            raise InvalidInputError("skeleton must have exactly 24 joints")
        if self.parent[0] != -1 or any(self.parent[i] >= i for i in range(1, N_JOINTS)):
            raise InvalidInputError("parent indices must satisfy parent[i] < i with root at 0")
        if not np.all(np.isfinite(self.offsets)):
            raise InvalidInputError("offsets must be finite")
        if self.total_mass <= 0 or self.total_height <= 0:
            raise InvalidInputError("total_mass and total_height must be positive")
        ch: list[list[int]] = [[] for _ in range(N_JOINTS)]
        for i in range(1, N_JOINTS):
            ch[self.parent[i]].append(i)
        object.__setattr__(self, "children", tuple(tuple(c) for c in ch))

    def to_json(self) -> dict:
        return {
            "joint_names": list(self.joint_names),
            "parent": [int(p) for p in self.parent],
            "offsets": self.offsets.tolist(),
            "total_mass": self.total_mass,
            "total_height": self.total_height,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "Skeleton":
        try:
            return cls(
                joint_names=tuple(doc["joint_names"]),
                parent=np.asarray(doc["parent"], dtype=int),
                offsets=np.asarray(doc["offsets"], dtype=float),
                total_mass=float(doc["total_mass"]),
                total_height=float(doc["total_height"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed skeleton document: {exc}") from exc

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json(), fh, indent=1)

    @classmethod
    def load(cls, path) -> "Skeleton":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def default_skeleton(total_mass: float = 75.0, total_height: float = 1.75) -> Skeleton:
    """Built-in SMPL-topology skeleton, rest offsets scaled linearly by height."""
    if total_mass <= 0 or total_height <= 0:
        raise InvalidInputError("total_mass and total_height must be positive")
    scale = total_height / TEMPLATE_HEIGHT
    return Skeleton(
        joint_names=JOINT_NAMES,
        parent=np.asarray(PARENTS, dtype=int),
        offsets=TEMPLATE_OFFSETS * scale,
        total_mass=float(total_mass),
        total_height=float(total_height),
    )


@dataclass
class Pose:
    """Single-frame pose: root orientation, 23 body joint rotations, root translation."""

    root_orient: np.ndarray  # (3,) axis-angle
    body: np.ndarray  # (23, 3) axis-angle
    root_trans: np.ndarray  # (3,) meters

    def as_joint_array(self) -> np.ndarray:
        """(24, 3) axis-angle array with the root orientation at index 0."""
        return np.concatenate([self.root_orient[None, :], self.body], axis=0)


@dataclass
class FrameKinematics:
    world_pos: np.ndarray  # (24, 3)
    world_rot: np.ndarray  # (24, 3, 3)


def fk_sequence(skel: Skeleton, poses: np.ndarray, trans: np.ndarray):
    """Forward kinematics for a whole sequence.

    poses: (T, 24, 3) axis-angle per joint (index 0 = root orientation),
    trans: (T, 3) root translation.  Returns (T, 24, 3) positions and
    (T, 24, 3, 3) world rotations.
    """
    poses = np.asarray(poses, dtype=float)
    trans = np.asarray(trans, dtype=float)
    if poses.ndim != 3 or poses.shape[1:] != (N_JOINTS, 3):
        raise InvalidInputError(f"poses must have shape (T, 24, 3), got {poses.shape}")
    if trans.shape != (poses.shape[0], 3):
        raise InvalidInputError("trans must have shape (T, 3) matching poses")
    if not (np.all(np.isfinite(poses)) and np.all(np.isfinite(trans))):
        raise InvalidInputError("pose parameters must be finite")

    t_len = poses.shape[0]
    local = rodrigues(poses)  # (T, 24, 3, 3)
    pos = np.empty((t_len, N_JOINTS, 3))
    rot = np.empty((t_len, N_JOINTS, 3, 3))
    pos[:, 0] = trans
    rot[:, 0] = local[:, 0]
    for i in range(1, N_JOINTS):
        p = skel.parent[i]
        rot[:, i] = rot[:, p] @ local[:, i]
        pos[:, i] = pos[:, p] + np.einsum("tab,b->ta", rot[:, p], skel.offsets[i])
    return pos, rot


def forward_kinematics(skel: Skeleton, pose: Pose) -> FrameKinematics:
    """Single-frame forward kinematics."""
    aa = pose.as_joint_array()[None]
    pos, rot = fk_sequence(skel, aa, np.asarray(pose.root_trans, dtype=float)[None])
    return FrameKinematics(world_pos=pos[0], world_rot=rot[0])
