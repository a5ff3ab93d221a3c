"""Noise models for pose sequences: uniform Gaussian and a video-estimator-like profile.

Randomness comes from numpy's PCG64 generator seeded explicitly, so a given
(seed, numpy version) pair reproduces noise byte-for-byte on any platform.
Derived seeds for trial sweeps are `seed + trial_index`.

The "realistic" profile models three artifacts of monocular pose estimators:
joint-dependent noise levels (distal joints noisier than proximal ones), a 2x
amplification of the rotation-noise component along the camera depth axis plus
a depth-axis wobble of the root translation (monocular depth ambiguity), and
high-frequency temporal jitter (white noise minus its one-frame moving
average).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, ParseError
from .motion import MotionSequence
from .skeleton import JOINT_NAMES, N_JOINTS

_J = {name: i for i, name in enumerate(JOINT_NAMES)}

# Jitter process: w[t] - (w[t] + w[t-1])/2 = (w[t] - w[t-1])/2 for white w.
JITTER_VARIANCE = 0.5


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def add_uniform_noise(motion: MotionSequence, sigma: float, seed: int = 42) -> MotionSequence:
    """I.i.d. zero-mean Gaussian noise with std `sigma` on all 72 pose channels.

    Root translation is untouched.
    """
    if sigma < 0:
        raise InvalidInputError("sigma must be non-negative")
    noisy = motion.copy()
    if sigma > 0:
        noisy.poses = noisy.poses + _rng(seed).normal(0.0, sigma, size=noisy.poses.shape)
    return noisy


@dataclass
class NoiseProfile:
    """Per-joint anisotropic noise description; deterministic given `seed`."""

    sigma: np.ndarray  # (24,) rad, per-joint axis-angle noise std
    depth_axis: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, 1.0]))
    depth_gain: float = 2.0
    jitter_gain: float = 0.5  # jitter amplitude as a multiple of the joint sigma
    trans_sigma_m: float = 0.05  # root-translation wobble along the depth axis
    seed: int = 42

    def __post_init__(self):
        self.sigma = np.asarray(self.sigma, dtype=float)
        self.depth_axis = np.asarray(self.depth_axis, dtype=float)
        if self.sigma.shape != (N_JOINTS,) or np.any(self.sigma < 0):
            raise InvalidInputError("sigma must be 24 non-negative values")
        n = np.linalg.norm(self.depth_axis)
        if n == 0 or not np.isfinite(n):
            raise InvalidInputError("depth_axis must be a nonzero finite vector")
        self.depth_axis = self.depth_axis / n
        if self.depth_gain < 1.0:
            raise InvalidInputError("depth_gain must be >= 1")

    def channel_variance(self) -> np.ndarray:
        """Expected per-channel variance (24, 3) of the generated rotation noise."""
        aniso = 1.0 + (self.depth_gain**2 - 1.0) * self.depth_axis**2
        base = self.sigma[:, None] ** 2 * aniso[None, :]
        jitter = (self.jitter_gain * self.sigma[:, None]) ** 2 * JITTER_VARIANCE
        return base + jitter

    def to_json(self) -> dict:
        return {
            "sigma": self.sigma.tolist(),
            "depth_axis": self.depth_axis.tolist(),
            "depth_gain": self.depth_gain,
            "jitter_gain": self.jitter_gain,
            "trans_sigma_m": self.trans_sigma_m,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "NoiseProfile":
        try:
            return cls(
                sigma=np.asarray(doc["sigma"], dtype=float),
                depth_axis=np.asarray(doc.get("depth_axis", [0.0, 0.0, 1.0]), dtype=float),
                depth_gain=float(doc.get("depth_gain", 2.0)),
                jitter_gain=float(doc.get("jitter_gain", 0.5)),
                trans_sigma_m=float(doc.get("trans_sigma_m", 0.05)),
                seed=int(doc.get("seed", 42)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed noise profile: {exc}") from exc

    @classmethod
    def load(cls, path) -> "NoiseProfile":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


def realistic_profile(seed: int = 42) -> NoiseProfile:
    """Built-in joint-dependent profile.

    Anchors: pelvis 0.02, spine 0.03, ankles 0.06, wrists 0.07; the remaining
    joints interpolate between those levels.
    """
    sigma = np.empty(N_JOINTS)
    levels = {
        "pelvis": 0.02,
        "spine1": 0.03,
        "spine2": 0.03,
        "spine3": 0.03,
        "left_collar": 0.03,
        "right_collar": 0.03,
        "neck": 0.04,
        "head": 0.04,
        "left_hip": 0.04,
        "right_hip": 0.04,
        "left_knee": 0.05,
        "right_knee": 0.05,
        "left_ankle": 0.06,
        "right_ankle": 0.06,
        "left_foot": 0.06,
        "right_foot": 0.06,
        "left_shoulder": 0.05,
        "right_shoulder": 0.05,
        "left_elbow": 0.05,
        "right_elbow": 0.05,
        "left_wrist": 0.07,
        "right_wrist": 0.07,
        "left_hand": 0.07,
        "right_hand": 0.07,
    }
    for name, value in levels.items():
        sigma[_J[name]] = value
    return NoiseProfile(sigma=sigma, seed=seed)


def add_realistic_noise(
    motion: MotionSequence, profile: NoiseProfile, seed: int | None = None
) -> MotionSequence:
    """Apply the profile: anisotropic per-joint noise + temporal jitter + root depth wobble."""
    rng = _rng(profile.seed if seed is None else seed)
    t_len = motion.n_frames
    d = profile.depth_axis

    base = rng.normal(size=(t_len, N_JOINTS, 3)) * profile.sigma[None, :, None]
    depth_component = np.einsum("tjc,c->tj", base, d)
    base = base + (profile.depth_gain - 1.0) * depth_component[..., None] * d

    white = rng.normal(size=(t_len, N_JOINTS, 3))
    moving_avg = white.copy()
    moving_avg[1:] = 0.5 * (white[1:] + white[:-1])
    jitter = (white - moving_avg) * (profile.jitter_gain * profile.sigma)[None, :, None]

    noisy = motion.copy()
    noisy.poses = noisy.poses + base + jitter
    if profile.trans_sigma_m > 0:
        wobble = rng.normal(0.0, profile.trans_sigma_m, size=t_len)
        noisy.trans = noisy.trans + wobble[:, None] * d
    return noisy


def matched_uniform_sigma(profile: NoiseProfile) -> float:
    """Uniform sigma whose per-channel variance equals the profile's mean nominal variance.

    Matching is over the profile's per-joint rotation-noise levels (mean of
    sigma_j^2 across the 24 joints).  The depth-axis amplification, temporal
    jitter, and root-translation wobble are the realistic model's
    distinguishing artifacts and deliberately have no uniform counterpart;
    comparing against noise of equivalent nominal magnitude is what isolates
    their effect.
    """
    return float(np.sqrt((profile.sigma**2).mean()))
