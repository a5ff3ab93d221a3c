"""Zero-phase Butterworth low-pass filtering of pose trajectories.

Digital coefficients come from the analog Butterworth prototype via the
bilinear transform with frequency pre-warping.  Zero phase is obtained with a
forward pass, reversal, second pass, reversal, over an odd-reflection padding
at each end; the filter state is initialised to its step steady state so
constant signals pass through unchanged.

The padding is at least 3*(order+1) samples and grows until the slowest filter
pole decays below 1e-12 (capped at one sample less than the signal), so that
time-reversing the input reverses the output to ~1e-9 rather than to the
~1e-3 edge-transient leakage a fixed 15-sample pad leaves behind.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, SequenceTooShortError


@dataclass(frozen=True)
class FilterSpec:
    cutoff_hz: float
    sample_rate_hz: float
    order: int = 4

    def __post_init__(self):
        if self.order < 1:
            raise InvalidInputError("order must be >= 1")
        if not (0.0 < self.cutoff_hz < self.sample_rate_hz / 2.0):
            raise InvalidInputError(
                f"cutoff must lie in (0, Nyquist): got {self.cutoff_hz} Hz at fs={self.sample_rate_hz} Hz"
            )

    @property
    def min_pad(self) -> int:
        return 3 * (self.order + 1)

    def pad_len(self, n_samples: int) -> int:
        """Reflection length: enough for pole transients to decay below 1e-12."""
        _, a = butterworth_coeffs(self)
        slowest = np.abs(np.roots(a)).max()
        if slowest < 1.0:
            decay = int(np.ceil(np.log(1e-12) / np.log(slowest)))
        else:  # numerically on the unit circle; fall back to the cap
            decay = n_samples - 1
        return min(max(self.min_pad, decay), n_samples - 1)


def butterworth_coeffs(spec: FilterSpec) -> tuple[np.ndarray, np.ndarray]:
    """Digital (b, a) coefficients with unity DC gain."""
    n = spec.order
    fs = spec.sample_rate_hz
    warped = 2.0 * fs * np.tan(np.pi * spec.cutoff_hz / fs)

    # Left-half-plane Butterworth poles of the analog prototype.
    k = np.arange(1, n + 1)
    poles = warped * np.exp(1j * np.pi * (2.0 * k + n - 1.0) / (2.0 * n))

    # Bilinear transform: s = 2 fs (z-1)/(z+1); all n zeros land at z = -1.
    z_poles = (2.0 * fs + poles) / (2.0 * fs - poles)
    a = np.real(np.poly(z_poles))
    b_unit = np.real(np.poly(-np.ones(n)))
    gain = a.sum() / b_unit.sum()  # H(z=1) = 1
    return b_unit * gain, a


def _lfilter(b: np.ndarray, a: np.ndarray, x: np.ndarray, zi_row: np.ndarray) -> np.ndarray:
    """Direct-form II transposed filter along axis 0; zi_row scales by x[0]."""
    n = len(a)
    state = zi_row[:, None] * x[0]  # (n-1, C)
    y = np.empty_like(x)
    for t in range(x.shape[0]):
        xt = x[t]
        yt = b[0] * xt + state[0]
        for i in range(n - 2):
            state[i] = b[i + 1] * xt + state[i + 1] - a[i + 1] * yt
        state[n - 2] = b[n - 1] * xt - a[n - 1] * yt
        y[t] = yt
    return y


def _steady_state_zi(b: np.ndarray, a: np.ndarray) -> np.ndarray:
    """Initial filter state whose step response is already settled (unit input)."""
    n = len(a) - 1
    # In DF2T form, a constant input x and output y = x require
    # z_i = b_{i+1} x + z_{i+1} - a_{i+1} y; solve the linear system for z/x.
    m = np.eye(n)
    for i in range(n - 1):
        m[i, i + 1] = -1.0
    rhs = b[1:] - a[1:]
    return np.linalg.solve(m, rhs)


def filtfilt(signal: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """Zero-phase filtering of a (T,) or (T, C) array along axis 0."""
    x = np.asarray(signal, dtype=float)
    squeeze = x.ndim == 1
    if squeeze:
        x = x[:, None]
    if x.ndim != 2:
        raise InvalidInputError("signal must be 1-D or 2-D (time on axis 0)")
    if x.shape[0] <= spec.min_pad:
        raise SequenceTooShortError(f"need more than {spec.min_pad} samples, got {x.shape[0]}")
    pad = spec.pad_len(x.shape[0])

    b, a = butterworth_coeffs(spec)
    zi = _steady_state_zi(b, a)

    # Odd reflection: 2 x[0] - x[pad..1] in front, mirrored at the tail.
    front = 2.0 * x[0] - x[pad:0:-1]
    back = 2.0 * x[-1] - x[-2 : -pad - 2 : -1]
    ext = np.concatenate([front, x, back], axis=0)

    y = _lfilter(b, a, ext, zi)
    y = _lfilter(b, a, y[::-1], zi)[::-1]
    y = y[pad : pad + x.shape[0]]
    return y[:, 0] if squeeze else y


def filter_motion(motion, spec: FilterSpec):
    """Filter each of the 72 axis-angle channels and 3 translation channels."""
    from .motion import MotionSequence  # local import to avoid a cycle

    t_len = motion.n_frames
    pose_flat = motion.poses.reshape(t_len, -1)
    return MotionSequence(
        fps=motion.fps,
        poses=filtfilt(pose_flat, spec).reshape(t_len, -1, 3),
        trans=filtfilt(motion.trans, spec),
    )
