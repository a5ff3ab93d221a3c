"""Convenience wrappers chaining FK -> finite differences -> inverse dynamics."""

from __future__ import annotations

from .derivatives import KinematicState, angular_derivatives, linear_derivatives
from .motion import MotionSequence
from .rnea import DynamicsResult, inverse_dynamics
from .segments import SegmentParamSet
from .skeleton import Skeleton, fk_sequence


def compute_kinematics(skel: Skeleton, motion: MotionSequence) -> KinematicState:
    pos, rot = fk_sequence(skel, motion.poses, motion.trans)
    vel, acc = linear_derivatives(pos, motion.dt)
    ang_vel, ang_acc = angular_derivatives(rot, motion.dt)
    return KinematicState(pos=pos, vel=vel, acc=acc, rot=rot, ang_vel=ang_vel, ang_acc=ang_acc, dt=motion.dt)


def compute_dynamics(
    skel: Skeleton,
    params: SegmentParamSet,
    motion: MotionSequence,
    mode: str = "joint-accel",
) -> DynamicsResult:
    return inverse_dynamics(skel, params, compute_kinematics(skel, motion), mode=mode)
