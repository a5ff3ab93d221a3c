"""Recursive Newton-Euler pass: net force and torque at every joint.

Two modes are provided:

  * "joint-accel" (default): the force term uses the acceleration of the
    joint itself and the torque equation carries no gravity/inertial moment for
    the segment's own mass offset,

        f_i   = m_i (a_i - g) + sum_children f_j
        tau_i = I_i alpha_i + omega_i x (I_i omega_i)
                + sum_children (tau_j + r_j x f_j),

    with r_j the world vector from joint i to child joint j and I_i the
    world-frame inertia about the segment CoM.

  * "com-corrected": classical RNEA bookkeeping; the force term uses the
    segment CoM acceleration and the torque gains the segment's own moment
    r_com x m (a_com - g).

All quantities are world-frame.  The root's wrench is the floating-base
residual (the whole-body Newton sum), not an actuated joint torque.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .derivatives import BOUNDARY_FRAMES, KinematicState, linear_derivatives
from .errors import InvalidInputError
from .segments import SegmentParamSet, world_inertia
from .skeleton import GRAVITY, N_JOINTS, Skeleton

MODES = ("joint-accel", "com-corrected")


@dataclass
class DynamicsResult:
    force: np.ndarray  # (T, 24, 3) N
    torque: np.ndarray  # (T, 24, 3) Nm


def inverse_dynamics(
    skel: Skeleton,
    params: SegmentParamSet,
    kin: KinematicState,
    mode: str = "joint-accel",
    gravity: np.ndarray = GRAVITY,
) -> DynamicsResult:
    """Leaves-to-root accumulation of per-joint forces and torques."""
    if mode not in MODES:
        raise InvalidInputError(f"mode must be one of {MODES}, got {mode!r}")
    t_len = kin.pos.shape[0]
    for arr, nm in ((kin.pos, "pos"), (kin.acc, "acc"), (kin.ang_vel, "ang_vel"), (kin.ang_acc, "ang_acc")):
        if arr.shape != (t_len, N_JOINTS, 3):
            raise InvalidInputError(f"kinematics field {nm} has shape {arr.shape}, expected {(t_len, N_JOINTS, 3)}")
    if kin.rot.shape != (t_len, N_JOINTS, 3, 3):
        raise InvalidInputError("rot must have shape (T, 24, 3, 3)")
    g = np.asarray(gravity, dtype=float)

    inertia_w = world_inertia(params.inertia_local, kin.rot)  # (T, 24, 3, 3)
    i_omega = np.einsum("tjab,tjb->tja", inertia_w, kin.ang_vel)
    tau = np.einsum("tjab,tjb->tja", inertia_w, kin.ang_acc) + np.cross(kin.ang_vel, i_omega)

    masses = params.mass[None, :, None]
    if mode == "joint-accel":
        force = masses * (kin.acc - g)
    else:
        com_world = kin.pos + np.einsum("tjab,jb->tja", kin.rot, params.com_offset)
        _, com_acc = linear_derivatives(com_world, kin.dt)
        net = masses * (com_acc - g)
        force = net.copy()
        r_com = com_world - kin.pos
        tau = tau + np.cross(r_com, net)

    force = force.copy()
    tau = tau.copy()
    # parent[i] < i, so a single descending sweep accumulates child wrenches.
    for i in range(N_JOINTS - 1, 0, -1):
        p = skel.parent[i]
        force[:, p] += force[:, i]
        tau[:, p] += tau[:, i] + np.cross(kin.pos[:, i] - kin.pos[:, p], force[:, i])
    return DynamicsResult(force=force, torque=tau)


def torque_error(
    result: DynamicsResult | np.ndarray,
    reference: DynamicsResult | np.ndarray,
    exclude_boundary: int = BOUNDARY_FRAMES,
) -> float:
    """Mean L2 norm (Nm) of per-joint torque deviation over interior frames."""
    a = result.torque if isinstance(result, DynamicsResult) else np.asarray(result)
    b = reference.torque if isinstance(reference, DynamicsResult) else np.asarray(reference)
    if a.shape != b.shape:
        raise InvalidInputError(f"shape mismatch: {a.shape} vs {b.shape}")
    sl = slice(exclude_boundary, a.shape[0] - exclude_boundary) if exclude_boundary else slice(None)
    if a[sl].size == 0:
        raise InvalidInputError("no interior frames left after boundary exclusion")
    return float(np.linalg.norm(a[sl] - b[sl], axis=-1).mean())


def dynamics_to_csv(
    result: DynamicsResult,
    path,
    joint_names,
    exclude_boundary: int = BOUNDARY_FRAMES,
) -> None:
    """Write per-frame, per-joint wrenches: frame,joint_name,fx,fy,fz,tx,ty,tz."""
    t_len = result.force.shape[0]
    lines = ["frame,joint_name,fx,fy,fz,tx,ty,tz"]
    for t in range(exclude_boundary, t_len - exclude_boundary):
        for j, name in enumerate(joint_names):
            f = result.force[t, j]
            q = result.torque[t, j]
            lines.append(
                f"{t},{name},{f[0]:.9g},{f[1]:.9g},{f[2]:.9g},{q[0]:.9g},{q[1]:.9g},{q[2]:.9g}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
