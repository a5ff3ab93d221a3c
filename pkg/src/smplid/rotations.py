"""3-vector / 3x3-matrix algebra: Rodrigues map, matrix logarithm, cross products.

Conventions: rotation matrices are row-major, right-handed, and act on column
vectors.  Axis-angle vectors point along the rotation axis with magnitude equal
to the angle in radians; the canonical angle range is [0, pi].
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

# Branch thresholds.  Below SMALL_ANGLE the Rodrigues coefficients use their
# second-order Taylor expansions (avoids 0/0 in sin(t)/t and returns the exact
# identity at t = 0).  Below LOG_SERIES_ANGLE the logarithm uses the series for
# t/(2 sin t), whose truncation error at 1e-3 is ~1e-23, i.e. below double
# precision.  Above NEAR_PI_ANGLE the axis is recovered from (R + I)/2 because
# vee(R - R^T) degenerates there.
SMALL_ANGLE = 1e-7
LOG_SERIES_ANGLE = 1e-3
NEAR_PI_ANGLE = np.pi - 1e-4


def _require_finite(x: np.ndarray, name: str) -> None:
    if not np.all(np.isfinite(x)):
        raise InvalidInputError(f"{name} contains non-finite values")


def cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Right-handed cross product, broadcasting over leading dimensions."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    _require_finite(a, "a")
    _require_finite(b, "b")
    return np.cross(a, b)


def rodrigues(aa: np.ndarray) -> np.ndarray:
    """Exponential map: axis-angle vector(s) (..., 3) -> rotation matrix (..., 3, 3).

    Exactly the identity for a zero vector.
    """
    aa = np.asarray(aa, dtype=float)
    if aa.shape[-1] != 3:
        raise InvalidInputError(f"axis-angle must have 3 components, got shape {aa.shape}")
    _require_finite(aa, "axis-angle")

    x, y, z = aa[..., 0], aa[..., 1], aa[..., 2]
    t2 = x * x + y * y + z * z
    theta = np.sqrt(t2)
    small = theta < SMALL_ANGLE

    safe = np.where(small, 1.0, theta)
    # A = sin(t)/t, B = (1 - cos(t))/t^2, with Taylor fallbacks near zero.
    a_coef = np.where(small, 1.0 - t2 / 6.0, np.sin(safe) / safe)
    b_coef = np.where(small, 0.5 - t2 / 24.0, (1.0 - np.cos(safe)) / np.where(small, 1.0, t2))

    r = np.empty(aa.shape[:-1] + (3, 3), dtype=float)
    r[..., 0, 0] = 1.0 + b_coef * (x * x - t2)
    r[..., 0, 1] = -a_coef * z + b_coef * x * y
    r[..., 0, 2] = a_coef * y + b_coef * x * z
    r[..., 1, 0] = a_coef * z + b_coef * x * y
    r[..., 1, 1] = 1.0 + b_coef * (y * y - t2)
    r[..., 1, 2] = -a_coef * x + b_coef * y * z
    r[..., 2, 0] = -a_coef * y + b_coef * x * z
    r[..., 2, 1] = a_coef * x + b_coef * y * z
    r[..., 2, 2] = 1.0 + b_coef * (z * z - t2)
    return r


def _check_rotation(r: np.ndarray, tol: float) -> None:
    eye = np.eye(3)
    err = np.abs(np.swapaxes(r, -1, -2) @ r - eye).max()
    if err > tol:
        raise InvalidInputError(f"matrix is not orthonormal within {tol:g} (deviation {err:.3g})")
    if np.any(np.linalg.det(r) < 0.0):
        raise InvalidInputError("matrix has negative determinant (not a rotation)")


def mat_log(r: np.ndarray, tol: float = 1e-6) -> np.ndarray:
    """Logarithm map: rotation matrix (..., 3, 3) -> axis-angle (..., 3), angle in [0, pi]."""
    r = np.asarray(r, dtype=float)
    if r.shape[-2:] != (3, 3):
        raise InvalidInputError(f"expected (..., 3, 3) matrix, got shape {r.shape}")
    _require_finite(r, "rotation")
    _check_rotation(r, tol)

    trace = r[..., 0, 0] + r[..., 1, 1] + r[..., 2, 2]
    t = np.clip((trace - 1.0) / 2.0, -1.0, 1.0)
    theta = np.arccos(t)

    vee = np.stack(
        [
            r[..., 2, 1] - r[..., 1, 2],
            r[..., 0, 2] - r[..., 2, 0],
            r[..., 1, 0] - r[..., 0, 1],
        ],
        axis=-1,
    )

    series = theta < LOG_SERIES_ANGLE
    near_pi = theta > NEAR_PI_ANGLE
    generic = ~series & ~near_pi

    t2 = theta * theta
    k = np.where(series, 0.5 + t2 / 12.0 + 7.0 * t2 * t2 / 720.0, 0.5)
    if np.any(generic):
        sin_safe = np.where(generic, np.sin(theta), 1.0)
        k = np.where(generic, theta / (2.0 * sin_safe), k)
    aa = k[..., None] * vee

    if np.any(near_pi):
        aa_pi = _log_near_pi(r, theta, vee)
        aa = np.where(near_pi[..., None], aa_pi, aa)
    return aa


def _log_near_pi(r: np.ndarray, theta: np.ndarray, vee: np.ndarray) -> np.ndarray:
    """Axis extraction near pi, where vee(R - R^T) degenerates.

    The symmetric part of (R + I)/2 equals uu^T (1-cos t)/2 + I (1+cos t)/2;
    subtracting the isotropic term isolates uu^T, whose dominant column gives
    the axis to O(float) accuracy (the raw (R + I)/2 column is only O(pi - t)
    accurate because of the residual skew part).
    """
    sym = (r + np.swapaxes(r, -1, -2)) / 4.0 + np.eye(3) / 2.0
    cos_t = np.cos(theta)
    m = sym - ((1.0 + cos_t) / 2.0)[..., None, None] * np.eye(3)
    diag = np.stack([m[..., 0, 0], m[..., 1, 1], m[..., 2, 2]], axis=-1)
    k = np.argmax(diag, axis=-1)
    axis = np.take_along_axis(np.swapaxes(m, -1, -2), k[..., None, None], axis=-2)[..., 0, :]
    norm = np.linalg.norm(axis, axis=-1, keepdims=True)
    axis = axis / np.where(norm > 0.0, norm, 1.0)

    # vee(R - R^T) = 2 sin(t) u still carries the axis sign while sin(t) > 0;
    # at exactly pi both signs are valid and we pick a deterministic one.
    sign = np.sum(axis * vee, axis=-1)
    at_pi = np.abs(sign) < 1e-12
    if np.any(at_pi):
        lead = np.where(
            np.abs(axis[..., 0]) > 1e-12,
            np.sign(axis[..., 0]),
            np.where(np.abs(axis[..., 1]) > 1e-12, np.sign(axis[..., 1]), np.sign(axis[..., 2])),
        )
        sign = np.where(at_pi, lead, sign)
    axis = axis * np.sign(sign)[..., None]
    return theta[..., None] * axis
