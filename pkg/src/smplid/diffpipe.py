"""Differentiable builds of the FK -> derivatives -> RNEA -> loss pipeline.

Every function here mirrors its numpy counterpart operation-for-operation so a
recorded tape reproduces the plain pipeline's values to rounding error, while
staying composed of tape primitives (data-dependent branches via where/gt).

Vectors are (x, y, z) tuples of Duals; matrices are row-major 9-tuples.
Multiplications by structurally-zero constants are skipped when composing with
constant offsets; IEEE guarantees that adding such exact zeros never changes
the result, so values still match the dense numpy code bit-for-bit.
"""

from __future__ import annotations

import numpy as np

from . import autodiff as ad
from .autodiff import Dual, Tape
from .errors import ComputationError, InvalidInputError
from .filtering import FilterSpec, butterworth_coeffs, _steady_state_zi
from .motion import MotionSequence
from .segments import SegmentParamSet
from .skeleton import GRAVITY, N_JOINTS, Skeleton

NEAR_PI_LIMIT = np.pi - 1e-3


# ---------------------------------------------------------------------------
# small dual-algebra helpers

def _mat_mul(a, b):
    out = []
    for i in range(3):
        for j in range(3):
            s = a[3 * i] * b[j] + a[3 * i + 1] * b[3 + j] + a[3 * i + 2] * b[6 + j]
            out.append(s)
    return tuple(out)


def _mat_t_mul(a, b):
    """a^T @ b for row-major 9-tuples."""
    out = []
    for i in range(3):
        for j in range(3):
            s = a[i] * b[j] + a[3 + i] * b[3 + j] + a[6 + i] * b[6 + j]
            out.append(s)
    return tuple(out)


def _mat_vec(m, v):
    return (
        m[0] * v[0] + m[1] * v[1] + m[2] * v[2],
        m[3] * v[0] + m[4] * v[1] + m[5] * v[2],
        m[6] * v[0] + m[7] * v[1] + m[8] * v[2],
    )


def _mat_const_vec(m, c):
    """m @ c with a constant 3-vector; zero components are skipped.

    Skipping is value-exact: x + 0.0 * r == x in IEEE arithmetic.
    """
    rows = []
    for i in range(3):
        term = None
        for j in range(3):
            if c[j] == 0.0:
                continue
            t = m[3 * i + j] * float(c[j])
            term = t if term is None else term + t
        rows.append(term if term is not None else m[0].tape.const(0.0))
    return tuple(rows)


def _cross(a, b):
    return (
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    )


def _v_add(a, b):
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def _v_sub(a, b):
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _v_scale(a, s: float):
    return (a[0] * s, a[1] * s, a[2] * s)


def rodrigues_dual(aa):
    """Axis-angle 3-tuple of Duals -> row-major rotation 9-tuple."""
    x, y, z = aa
    xx, yy, zz = x * x, y * y, z * z
    t2 = xx + yy + zz
    big = ad.gt(t2, 1e-14)
    t2_safe = ad.where(big, t2, 1.0)
    theta = ad.sqrt(t2_safe)
    a_coef = ad.where(big, ad.sin(theta) / theta, 1.0 - t2 * (1.0 / 6.0))
    b_coef = ad.where(big, (1.0 - ad.cos(theta)) / t2_safe, 0.5 - t2 * (1.0 / 24.0))
    xy, xz, yz = x * y, x * z, y * z
    ax, ay, az = a_coef * x, a_coef * y, a_coef * z
    return (
        1.0 + b_coef * (xx - t2),
        b_coef * xy - az,
        b_coef * xz + ay,
        b_coef * xy + az,
        1.0 + b_coef * (yy - t2),
        b_coef * yz - ax,
        b_coef * xz - ay,
        b_coef * yz + ax,
        1.0 + b_coef * (zz - t2),
    )


def mat_log_dual(m):
    """Rotation 9-tuple -> axis-angle 3-tuple; raises near the pi branch."""
    tr = m[0] + m[4] + m[8]
    t = ad.clamp((tr - 1.0) * 0.5, -1.0 + 1e-9, 1.0 - 1e-9)
    theta = ad.acos(t)
    if theta.value > NEAR_PI_LIMIT:
        raise ComputationError(
            f"relative rotation angle {theta.value:.4f} is too close to pi for the differentiable log"
        )
    t2 = theta * theta
    series = 0.5 + t2 * (1.0 / 12.0) + (t2 * t2) * (7.0 / 720.0)
    big = ad.gt(theta, 1e-3)
    sin_safe = ad.where(big, ad.sin(theta), 1.0)
    k = ad.where(big, theta / (sin_safe * 2.0), series)
    return (k * (m[7] - m[5]), k * (m[2] - m[6]), k * (m[3] - m[1]))


# ---------------------------------------------------------------------------
# pipeline stages

def fk_dual(skel: Skeleton, poses, trans):
    """poses: T x 24 axis-angle dual tuples, trans: T dual tuples.

    Returns (positions, rotations) as T x 24 lists.
    """
    t_len = len(poses)
    pos = [[None] * N_JOINTS for _ in range(t_len)]
    rot = [[None] * N_JOINTS for _ in range(t_len)]
    for t in range(t_len):
        rot[t][0] = rodrigues_dual(poses[t][0])
        pos[t][0] = trans[t]
        for i in range(1, N_JOINTS):
            p = skel.parent[i]
            rot[t][i] = _mat_mul(rot[t][p], rodrigues_dual(poses[t][i]))
            pos[t][i] = _v_add(pos[t][p], _mat_const_vec(rot[t][p], skel.offsets[i]))
    return pos, rot


def _central_series(values, dt: float):
    """Velocity/acceleration tuples with replicated boundaries, per time list."""
    t_len = len(values)
    inv2 = 1.0 / (2.0 * dt)
    invd2 = 1.0 / (dt * dt)
    vel = [None] * t_len
    acc = [None] * t_len
    for t in range(1, t_len - 1):
        nxt, mid, prv = values[t + 1], values[t], values[t - 1]
        vel[t] = tuple((nxt[c] - prv[c]) * inv2 for c in range(3))
        acc[t] = tuple(((nxt[c] - mid[c] * 2.0) + prv[c]) * invd2 for c in range(3))
    vel[0], vel[-1] = vel[1], vel[-2]
    acc[0], acc[-1] = acc[1], acc[-2]
    return vel, acc


def derivatives_dual(pos, rot, dt: float):
    """Mirror of rnea-side kinematics: linear vel/acc, world-frame omega/alpha."""
    t_len = len(pos)
    if t_len < 5:
        raise InvalidInputError("differentiable pipeline needs at least 5 frames")
    inv2 = 1.0 / (2.0 * dt)

    vel = [[None] * N_JOINTS for _ in range(t_len)]
    acc = [[None] * N_JOINTS for _ in range(t_len)]
    for j in range(N_JOINTS):
        v, a = _central_series([pos[t][j] for t in range(t_len)], dt)
        for t in range(t_len):
            vel[t][j] = v[t]
            acc[t][j] = a[t]

    omega = [[None] * N_JOINTS for _ in range(t_len)]
    for t in range(1, t_len - 1):
        for j in range(N_JOINTS):
            rel = _mat_t_mul(rot[t - 1][j], rot[t + 1][j])
            log = mat_log_dual(rel)
            omega[t][j] = _v_scale(_mat_vec(rot[t][j], log), inv2)
    omega[0], omega[-1] = omega[1], omega[-2]

    alpha = [[None] * N_JOINTS for _ in range(t_len)]
    for t in range(2, t_len - 2):
        for j in range(N_JOINTS):
            alpha[t][j] = _v_scale(_v_sub(omega[t + 1][j], omega[t - 1][j]), inv2)
    alpha[0] = alpha[1] = alpha[2]
    alpha[-1] = alpha[-2] = alpha[-3]
    return vel, acc, omega, alpha


def rnea_dual(skel: Skeleton, params: SegmentParamSet, pos, acc, rot, omega, alpha, gravity=GRAVITY):
    """Joint-acceleration recursion; returns T x 24 torque tuples (world frame)."""
    t_len = len(pos)
    zero = pos[0][0][0].tape.const(0.0)
    forces = [[None] * N_JOINTS for _ in range(t_len)]
    taus = [[None] * N_JOINTS for _ in range(t_len)]
    for t in range(t_len):
        for j in range(N_JOINTS):
            r = rot[t][j]
            i_loc = params.inertia_local[j]
            if np.any(i_loc != 0.0):
                # m1[c] holds column c of R @ I_loc; iw is symmetric so only
                # the upper triangle is computed
                m1 = [_mat_const_vec(r, i_loc[:, c]) for c in range(3)]
                iw = [[None] * 3 for _ in range(3)]
                for a_i in range(3):
                    for b_i in range(a_i, 3):
                        s = m1[0][a_i] * r[3 * b_i] + m1[1][a_i] * r[3 * b_i + 1] + m1[2][a_i] * r[3 * b_i + 2]
                        iw[a_i][b_i] = s
                        iw[b_i][a_i] = s

                def iw_vec(v):
                    return (
                        iw[0][0] * v[0] + iw[0][1] * v[1] + iw[0][2] * v[2],
                        iw[1][0] * v[0] + iw[1][1] * v[1] + iw[1][2] * v[2],
                        iw[2][0] * v[0] + iw[2][1] * v[1] + iw[2][2] * v[2],
                    )

                w = omega[t][j]
                tau_own = _v_add(iw_vec(alpha[t][j]), _cross(w, iw_vec(w)))
            else:
                tau_own = (zero, zero, zero)
            m = float(params.mass[j])
            a_vec = acc[t][j]
            f_own = tuple((a_vec[c] - float(gravity[c])) * m if gravity[c] != 0.0 else a_vec[c] * m for c in range(3))
            forces[t][j] = f_own
            taus[t][j] = tau_own
        for i in range(N_JOINTS - 1, 0, -1):
            p = skel.parent[i]
            forces[t][p] = _v_add(forces[t][p], forces[t][i])
            lever = _v_sub(pos[t][i], pos[t][p])
            taus[t][p] = _v_add(taus[t][p], _v_add(taus[t][i], _cross(lever, forces[t][i])))
    return taus


# ---------------------------------------------------------------------------
# input packing and tape builders

def pack_motion(motion: MotionSequence, include_translation: bool = True) -> np.ndarray:
    flat = motion.poses.reshape(-1)
    if include_translation:
        return np.concatenate([flat, motion.trans.reshape(-1)])
    return flat.copy()


def unpack_motion(x: np.ndarray, template: MotionSequence, include_translation: bool = True) -> MotionSequence:
    t_len = template.n_frames
    poses = x[: t_len * N_JOINTS * 3].reshape(t_len, N_JOINTS, 3).copy()
    if include_translation:
        trans = x[t_len * N_JOINTS * 3 :].reshape(t_len, 3).copy()
    else:
        trans = template.trans.copy()
    return MotionSequence(fps=template.fps, poses=poses, trans=trans)


def _inputs_to_pose_tuples(tape: Tape, motion: MotionSequence, include_translation: bool):
    """Create tape inputs in pack_motion order; returns (poses, trans) dual tuples."""
    t_len = motion.n_frames
    duals = [
        [
            tuple(tape.input(motion.poses[t, j, c]) for c in range(3))
            for j in range(N_JOINTS)
        ]
        for t in range(t_len)
    ]
    if include_translation:
        trans = [tuple(tape.input(motion.trans[t, c]) for c in range(3)) for t in range(t_len)]
    else:
        trans = [tuple(tape.const(motion.trans[t, c]) for c in range(3)) for t in range(t_len)]
    return duals, trans


def _mean(tape: Tape, terms):
    if not terms:
        return tape.const(0.0)
    s = terms[0]
    for term in terms[1:]:
        s = s + term
    return s * (1.0 / len(terms))


def torques_from_motion_dual(tape_motion, skel, params, dt, prefilter: FilterSpec | None = None):
    poses, trans = tape_motion
    if prefilter is not None:
        poses, trans = filter_channels_dual(poses, trans, prefilter)
    pos, rot = fk_dual(skel, poses, trans)
    _, acc, omega, alpha = derivatives_dual(pos, rot, dt)
    return rnea_dual(skel, params, pos, acc, rot, omega, alpha)


def build_torque_error_tape(
    skel: Skeleton,
    params: SegmentParamSet,
    motion: MotionSequence,
    reference_torque: np.ndarray,
    exclude_boundary: int = 2,
    include_translation: bool = True,
):
    """Tape computing mean per-joint torque deviation from a constant reference."""
    tape = Tape()
    tm = _inputs_to_pose_tuples(tape, motion, include_translation)
    taus = torques_from_motion_dual(tm, skel, params, motion.dt)
    t_len = motion.n_frames
    terms = []
    for t in range(exclude_boundary, t_len - exclude_boundary):
        for j in range(N_JOINTS):
            d = tuple(taus[t][j][c] - float(reference_torque[t, j, c]) for c in range(3))
            terms.append(ad.norm3(*d))
    out = _mean(tape, terms)
    tape.finalize()
    return tape, out.idx


def build_physics_loss_tape(
    skel: Skeleton,
    params: SegmentParamSet,
    motion_noisy: MotionSequence,
    lambda_smooth: float,
    lambda_mag: float,
    lambda_reg: float,
    tau_max: float,
    include_translation: bool = True,
    prefilter: FilterSpec | None = None,
    squared_norms: bool = False,
):
    """Tape for: smoothness of torque second differences + magnitude cap + pose anchor."""
    tape = Tape()
    tm = _inputs_to_pose_tuples(tape, motion_noisy, include_translation)
    poses, trans = tm
    taus = torques_from_motion_dual(tm, skel, params, motion_noisy.dt, prefilter)
    t_len = motion_noisy.n_frames
    dt = motion_noisy.dt
    invd2 = 1.0 / (dt * dt)

    def vec_term(v):
        # squared norms skip the sqrt entirely (smooth everywhere)
        ss = v[0] * v[0] + v[1] * v[1] + v[2] * v[2]
        return ss if squared_norms else ad.norm3(*v)

    smooth_terms = []
    for t in range(3, t_len - 3):
        for j in range(N_JOINTS):
            tdd = tuple(
                ((taus[t + 1][j][c] - taus[t][j][c] * 2.0) + taus[t - 1][j][c]) * invd2 for c in range(3)
            )
            smooth_terms.append(vec_term(tdd))

    mag_terms = []
    for t in range(2, t_len - 2):
        for j in range(N_JOINTS):
            excess = ad.relu(ad.norm3(*taus[t][j]) - tau_max)
            mag_terms.append(excess * excess if squared_norms else excess)

    reg_terms = []
    for t in range(t_len):
        for j in range(N_JOINTS):
            d = tuple(poses[t][j][c] - float(motion_noisy.poses[t, j, c]) for c in range(3))
            reg_terms.append(vec_term(d))
        if include_translation:
            d = tuple(trans[t][c] - float(motion_noisy.trans[t, c]) for c in range(3))
            reg_terms.append(vec_term(d))

    out = (
        _mean(tape, smooth_terms) * lambda_smooth
        + _mean(tape, mag_terms) * lambda_mag
        + _mean(tape, reg_terms) * lambda_reg
    )
    tape.finalize()
    return tape, out.idx


# ---------------------------------------------------------------------------
# differentiable zero-phase filtering (optional pipeline stage)

def _lfilter_dual(b, a, xs, zi):
    n = len(a)
    state = [xs[0] * float(zi[i]) for i in range(n - 1)]
    ys = []
    for x in xs:
        y = x * float(b[0]) + state[0]
        for i in range(n - 2):
            state[i] = x * float(b[i + 1]) + state[i + 1] - y * float(a[i + 1])
        state[n - 2] = x * float(b[n - 1]) - y * float(a[n - 1])
        ys.append(y)
    return ys


def filtfilt_dual(xs, spec: FilterSpec):
    """Zero-phase filtering of a list of Duals; mirrors filtering.filtfilt."""
    b, a = butterworth_coeffs(spec)
    zi = _steady_state_zi(b, a)
    pad = spec.pad_len(len(xs))
    front = [xs[0] * 2.0 - xs[k] for k in range(pad, 0, -1)]
    back = [xs[-1] * 2.0 - xs[-2 - k] for k in range(pad)]
    ext = front + list(xs) + back
    y = _lfilter_dual(b, a, ext, zi)
    y = _lfilter_dual(b, a, y[::-1], zi)[::-1]
    return y[pad : pad + len(xs)]


def filter_channels_dual(poses, trans, spec: FilterSpec):
    t_len = len(poses)
    new_poses = [[[None] * 3 for _ in range(N_JOINTS)] for _ in range(t_len)]
    for j in range(N_JOINTS):
        for c in range(3):
            filtered = filtfilt_dual([poses[t][j][c] for t in range(t_len)], spec)
            for t in range(t_len):
                new_poses[t][j][c] = filtered[t]
    new_trans = [[None] * 3 for _ in range(t_len)]
    for c in range(3):
        filtered = filtfilt_dual([trans[t][c] for t in range(t_len)], spec)
        for t in range(t_len):
            new_trans[t][c] = filtered[t]
    return (
        [[tuple(new_poses[t][j]) for j in range(N_JOINTS)] for t in range(t_len)],
        [tuple(new_trans[t]) for t in range(t_len)],
    )
