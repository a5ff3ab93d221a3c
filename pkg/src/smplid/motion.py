"""Motion sequences: the `.motion.json` format and a procedural walk generator.

The generator produces a planar-ish gait from sinusoids: hip flexion at the
stride frequency, knee flexion with a doubled-frequency component, antiphase
arm swing on shoulders rotated down from the T-pose, pelvis translation at
constant speed with a vertical bob, and a small pelvis/spine counter-rotation.
All amplitudes and frequencies are configuration with documented defaults, not
ground truth; they are chosen so the clean gait keeps physiological torque
magnitudes and spectral content below ~4 Hz.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import InvalidInputError, ParseError
from .skeleton import JOINT_NAMES, N_JOINTS

_J = {name: i for i, name in enumerate(JOINT_NAMES)}


@dataclass
class MotionSequence:
    """T frames of SMPL pose: fps, (T, 24, 3) axis-angle, (T, 3) root translation."""

    fps: float
    poses: np.ndarray
    trans: np.ndarray

    def __post_init__(self):
        self.poses = np.asarray(self.poses, dtype=float)
        self.trans = np.asarray(self.trans, dtype=float)
        if self.fps <= 0:
            raise InvalidInputError("fps must be positive")
        if self.poses.ndim != 3 or self.poses.shape[1:] != (N_JOINTS, 3):
            raise InvalidInputError(f"poses must have shape (T, 24, 3), got {self.poses.shape}")
        if self.trans.shape != (self.poses.shape[0], 3):
            raise InvalidInputError("trans must have shape (T, 3)")
        if self.poses.shape[0] < 3:
            raise InvalidInputError("a motion needs at least 3 frames")
        if not (np.all(np.isfinite(self.poses)) and np.all(np.isfinite(self.trans))):
            raise InvalidInputError("motion contains non-finite values")

    @property
    def n_frames(self) -> int:
        return self.poses.shape[0]

    @property
    def dt(self) -> float:
        return 1.0 / self.fps

    def copy(self) -> "MotionSequence":
        return MotionSequence(self.fps, self.poses.copy(), self.trans.copy())


@dataclass
class GaitConfig:
    stride_hz: float = 1.0
    hip_amp: float = 0.4  # rad, sagittal hip swing
    knee_amp: float = 0.30  # rad, stride-frequency knee flexion
    knee_amp2: float = 0.12  # rad, doubled-frequency component
    ankle_amp: float = 0.12
    arm_swing: float = 0.25  # rad, shoulder swing, antiphase to same-side leg
    arm_down: float = 1.2  # rad, static shoulder rotation out of the T-pose
    elbow_bend: float = 0.3  # rad, static elbow flexion
    pelvis_sway: float = 0.06  # rad, yaw oscillation of the root
    spine_counter: float = 0.10  # rad, opposing yaw at spine3
    walk_speed: float = 1.2  # m/s, forward (+z)
    bob_amp: float = 0.02  # m, vertical bob at twice the stride frequency
    root_height: float = 0.95  # m


def synth_walk(duration_s: float, fps: float, config: GaitConfig | None = None) -> MotionSequence:
    """Procedural walking clip; deterministic in (duration, fps, config)."""
    if duration_s <= 0 or fps <= 0:
        raise InvalidInputError("duration and fps must be positive")
    cfg = config or GaitConfig()
    t_len = int(round(duration_s * fps))
    if t_len < 3:
        raise InvalidInputError("duration too short for the requested fps")
    t = np.arange(t_len) / fps
    w = 2.0 * math.pi * cfg.stride_hz
    s, c2 = np.sin(w * t), np.cos(2.0 * w * t)

    poses = np.zeros((t_len, N_JOINTS, 3))
    trans = np.zeros((t_len, 3))

    # Legs: left at phase 0, right half a stride later.
    poses[:, _J["left_hip"], 0] = cfg.hip_amp * s
    poses[:, _J["right_hip"], 0] = -cfg.hip_amp * s
    knee = 0.5 * cfg.knee_amp * (1.0 - np.cos(w * t)) + 0.5 * cfg.knee_amp2 * (1.0 - c2)
    knee_shift = 0.5 * cfg.knee_amp * (1.0 + np.cos(w * t)) + 0.5 * cfg.knee_amp2 * (1.0 - c2)
    poses[:, _J["left_knee"], 0] = knee
    poses[:, _J["right_knee"], 0] = knee_shift
    poses[:, _J["left_ankle"], 0] = -cfg.ankle_amp * s
    poses[:, _J["right_ankle"], 0] = cfg.ankle_amp * s

    # Arms: rotated down from the T-pose, swinging against the same-side leg.
    poses[:, _J["left_shoulder"], 2] = -cfg.arm_down
    poses[:, _J["right_shoulder"], 2] = cfg.arm_down
    poses[:, _J["left_shoulder"], 0] = -cfg.arm_swing * s
    poses[:, _J["right_shoulder"], 0] = cfg.arm_swing * s
    poses[:, _J["left_elbow"], 2] = -cfg.elbow_bend
    poses[:, _J["right_elbow"], 2] = cfg.elbow_bend

    # Trunk: root yaw sway with a counter-rotation higher up the spine.
    poses[:, _J["pelvis"], 1] = cfg.pelvis_sway * s
    poses[:, _J["spine3"], 1] = -cfg.spine_counter * s

    trans[:, 2] = cfg.walk_speed * t
    trans[:, 1] = cfg.root_height + cfg.bob_amp * np.sin(2.0 * w * t)
    return MotionSequence(fps=fps, poses=poses, trans=trans)


def gait_config_dict(cfg: GaitConfig) -> dict:
    return asdict(cfg)


def save_motion(motion: MotionSequence, path) -> None:
    doc = {
        "fps": motion.fps,
        "frames": [
            {"root_trans": motion.trans[k].tolist(), "pose": motion.poses[k].tolist()}
            for k in range(motion.n_frames)
        ],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_motion(path) -> MotionSequence:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: invalid JSON: {exc}") from exc

    if not isinstance(doc, dict) or "fps" not in doc or "frames" not in doc:
        raise ParseError(f"{path}: expected an object with 'fps' and 'frames'")
    fps = doc["fps"]
    if not isinstance(fps, (int, float)) or fps <= 0:
        raise ParseError(f"{path}: fps must be a positive number, got {fps!r}")
    frames = doc["frames"]
    if not isinstance(frames, list) or len(frames) < 3:
        raise ParseError(f"{path}: need a list of at least 3 frames")

    t_len = len(frames)
    poses = np.empty((t_len, N_JOINTS, 3))
    trans = np.empty((t_len, 3))
    for k, frame in enumerate(frames):
        try:
            rt = frame["root_trans"]
            pose = frame["pose"]
        except (TypeError, KeyError) as exc:
            raise ParseError(f"{path}: frame {k}: missing {exc}") from exc
        if len(rt) != 3:
            raise ParseError(f"{path}: frame {k}: expected 3 root_trans entries, got {len(rt)}")
        if len(pose) != N_JOINTS:
            raise ParseError(f"{path}: frame {k}: expected 24 pose entries, got {len(pose)}")
        for j, aa in enumerate(pose):
            if len(aa) != 3:
                raise ParseError(f"{path}: frame {k}, joint {j}: expected 3 components")
        trans[k] = rt
        poses[k] = pose
    if not (np.all(np.isfinite(poses)) and np.all(np.isfinite(trans))):
        bad = np.argwhere(~np.isfinite(poses))
        where = f"frame {bad[0][0]}, joint {bad[0][1]}" if len(bad) else "root_trans"
        raise ParseError(f"{path}: non-finite value at {where}")
    return MotionSequence(fps=float(fps), poses=poses, trans=trans)
