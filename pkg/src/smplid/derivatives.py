"""Central finite differences for linear and angular motion.

Velocities use (p[t+1] - p[t-1]) / (2 dt); accelerations use the second
difference (p[t+1] - 2 p[t] + p[t-1]) / dt^2.  Boundary frames replicate the
nearest interior value rather than falling back to one-sided differences, and
all error metrics in this package exclude two frames at each end accordingly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SequenceTooShortError
from .rotations import mat_log

# Frames to drop at each end of a sequence before computing error statistics:
# velocities/omega are replicated at 1 frame, accelerations/alpha at 2.
BOUNDARY_FRAMES = 2


@dataclass
class KinematicState:
    """Per-frame, per-joint kinematics: the input to inverse dynamics."""

    pos: np.ndarray  # (T, 24, 3) m
    vel: np.ndarray  # (T, 24, 3) m/s
    acc: np.ndarray  # (T, 24, 3) m/s^2
    rot: np.ndarray  # (T, 24, 3, 3)
    ang_vel: np.ndarray  # (T, 24, 3) rad/s, world frame
    ang_acc: np.ndarray  # (T, 24, 3) rad/s^2, world frame
    dt: float


def linear_derivatives(pos: np.ndarray, dt: float):
    """Velocity and acceleration of a (T, ...) position array."""
    pos = np.asarray(pos, dtype=float)
    if dt <= 0:
        raise InvalidInputError("dt must be positive")
    t_len = pos.shape[0]
    if t_len < 3:
        raise SequenceTooShortError("need at least 3 frames for central differences")

    vel = np.empty_like(pos)
    acc = np.empty_like(pos)
    vel[1:-1] = (pos[2:] - pos[:-2]) / (2.0 * dt)
    acc[1:-1] = (pos[2:] - 2.0 * pos[1:-1] + pos[:-2]) / (dt * dt)
    vel[0], vel[-1] = vel[1], vel[-2]
    acc[0], acc[-1] = acc[1], acc[-2]
    return vel, acc


def angular_derivatives(rot: np.ndarray, dt: float):
    """Angular velocity/acceleration from a (T, ..., 3, 3) rotation array.

    omega(t) = R(t) . log(R(t-1)^T R(t+1)) / (2 dt): the relative-rotation
    logarithm mapped into the world frame, so downstream torques live in world
    coordinates.  alpha is the central difference of omega; both replicate at
    the boundaries (alpha has two replicated frames per end since it consumes
    omega at t +/- 1).
    """
    rot = np.asarray(rot, dtype=float)
    if dt <= 0:
        raise InvalidInputError("dt must be positive")
    t_len = rot.shape[0]
    if t_len < 3:
        raise SequenceTooShortError("need at least 3 frames for central differences")

    rel = np.swapaxes(rot[:-2], -1, -2) @ rot[2:]
    log_rel = mat_log(rel)  # (T-2, ..., 3), frame of R(t-1)
    omega = np.empty(rot.shape[:-2] + (3,))
    omega[1:-1] = np.einsum("...ab,...b->...a", rot[1:-1], log_rel) / (2.0 * dt)
    omega[0], omega[-1] = omega[1], omega[-2]

    alpha = np.empty_like(omega)
    if t_len >= 5:
        alpha[2:-2] = (omega[3:-1] - omega[1:-3]) / (2.0 * dt)
        alpha[0] = alpha[1] = alpha[2]
        alpha[-1] = alpha[-2] = alpha[-3]
    else:
        alpha[:] = 0.0
    return omega, alpha


def amplification_gain(dt: float) -> float:
    """White-noise std gain of the second-difference operator: sqrt(6) / dt^2.

    The coefficients (1, -2, 1)/dt^2 have L2 norm sqrt(6)/dt^2, which is the
    factor by which i.i.d. per-frame noise is amplified into acceleration noise.
    """
    if dt <= 0:
        raise InvalidInputError("dt must be positive")
    return math.sqrt(6.0) / (dt * dt)
