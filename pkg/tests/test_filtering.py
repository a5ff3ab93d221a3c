import numpy as np
import pytest
import scipy.signal

from smplid import (
    FilterSpec,
    InvalidInputError,
    SequenceTooShortError,
    butterworth_coeffs,
    compute_dynamics,
    build_segment_params,
    default_skeleton,
    filter_motion,
    filtfilt,
    synth_walk,
    torque_error,
)


def amplitude_ratio(freq_hz, cutoff_hz, fs=30.0, n=600):
    t = np.arange(n) / fs
    x = np.sin(2 * np.pi * freq_hz * t)
    y = filtfilt(x, FilterSpec(cutoff_hz=cutoff_hz, sample_rate_hz=fs))
    mid = slice(n // 4, 3 * n // 4)
    return np.sqrt((y[mid] ** 2).mean() / (x[mid] ** 2).mean())


class TestButterworthCoeffs:
    def test_unity_dc_gain(self):
        for cutoff, fs in [(6.0, 30.0), (2.0, 30.0), (14.0, 30.0), (10.0, 120.0)]:
            b, a = butterworth_coeffs(FilterSpec(cutoff_hz=cutoff, sample_rate_hz=fs))
            assert b.sum() / a.sum() == pytest.approx(1.0, abs=1e-12)

    def test_half_power_at_cutoff(self):
        spec = FilterSpec(cutoff_hz=7.5, sample_rate_hz=30.0)  # Nyquist / 2
        b, a = butterworth_coeffs(spec)
        w = 2 * np.pi * spec.cutoff_hz / spec.sample_rate_hz
        z = np.exp(1j * w)
        h = np.polyval(b, z) / np.polyval(a, z)
        assert abs(h) ** 2 == pytest.approx(0.5, abs=1e-9)

    def test_matches_scipy_reference(self):
        spec = FilterSpec(cutoff_hz=6.0, sample_rate_hz=30.0)
        b, a = butterworth_coeffs(spec)
        b_ref, a_ref = scipy.signal.butter(4, 6.0 / 15.0)
        assert np.abs(b - b_ref).max() < 1e-9
        assert np.abs(a - a_ref).max() < 1e-9

    def test_cutoff_validation(self):
        with pytest.raises(InvalidInputError):
            FilterSpec(cutoff_hz=15.0, sample_rate_hz=30.0)
        with pytest.raises(InvalidInputError):
            FilterSpec(cutoff_hz=0.0, sample_rate_hz=30.0)


class TestFiltfilt:
    def test_constant_signal_unchanged(self):
        x = np.full(60, 3.7)
        y = filtfilt(x, FilterSpec(cutoff_hz=6.0, sample_rate_hz=30.0))
        assert np.abs(y - x).max() < 1e-9

    def test_passband_sine_preserved(self):
        assert amplitude_ratio(1.0, 6.0) >= 0.999

    def test_stopband_sine_attenuated(self):
        assert amplitude_ratio(12.0, 6.0) < 0.01

    def test_zero_phase_flip_symmetry(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=90)
        spec = FilterSpec(cutoff_hz=6.0, sample_rate_hz=30.0)
        assert np.abs(filtfilt(x[::-1], spec) - filtfilt(x, spec)[::-1]).max() < 1e-9

    def test_linearity(self):
        rng = np.random.default_rng(6)
        x, y = rng.normal(size=80), rng.normal(size=80)
        spec = FilterSpec(cutoff_hz=5.0, sample_rate_hz=30.0)
        lhs = filtfilt(2.0 * x - 3.0 * y, spec)
        rhs = 2.0 * filtfilt(x, spec) - 3.0 * filtfilt(y, spec)
        assert np.abs(lhs - rhs).max() < 1e-10

    def test_double_filtering_never_grows_high_band(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=256)
        spec = FilterSpec(cutoff_hz=6.0, sample_rate_hz=30.0)
        y1 = filtfilt(x, spec)
        y2 = filtfilt(y1, spec)
        freqs = np.fft.rfftfreq(256, d=1 / 30)
        hi = freqs > 6.0
        e1 = (np.abs(np.fft.rfft(y1)[hi]) ** 2).sum()
        e2 = (np.abs(np.fft.rfft(y2)[hi]) ** 2).sum()
        assert e2 <= e1 + 1e-12

    def test_matches_scipy_filtfilt(self):
        rng = np.random.default_rng(8)
        x = rng.normal(size=120)
        spec = FilterSpec(cutoff_hz=6.0, sample_rate_hz=30.0)
        b, a = scipy.signal.butter(4, 6.0 / 15.0)
        ref = scipy.signal.filtfilt(b, a, x, padlen=spec.pad_len(len(x)))
        assert np.abs(filtfilt(x, spec) - ref).max() < 1e-9

    def test_too_short_sequence(self):
        with pytest.raises(SequenceTooShortError):
            filtfilt(np.zeros(15), FilterSpec(cutoff_hz=6.0, sample_rate_hz=30.0))


class TestFilterMotion:
    def test_zero_motion_stays_zero(self):
        walk = synth_walk(2.0, 30.0)
        walk.poses[:] = 0.0
        walk.trans[:] = 0.0
        out = filter_motion(walk, FilterSpec(cutoff_hz=6.0, sample_rate_hz=30.0))
        assert np.abs(out.poses).max() < 1e-12
        assert np.abs(out.trans).max() < 1e-12

    def test_clean_walk_barely_distorted_at_6hz(self):
        sk = default_skeleton()
        par = build_segment_params(sk)
        walk = synth_walk(4.0, 30.0)
        clean = compute_dynamics(sk, par, walk)
        filtered = compute_dynamics(sk, par, filter_motion(walk, FilterSpec(6.0, 30.0)))
        scale = np.linalg.norm(clean.torque[2:-2], axis=-1).mean()
        assert torque_error(filtered, clean) < 0.15 * scale
