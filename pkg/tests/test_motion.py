import json

import numpy as np
import pytest

from smplid import (
    GaitConfig,
    JOINT_NAMES,
    ParseError,
    build_segment_params,
    compute_dynamics,
    default_skeleton,
    load_motion,
    save_motion,
    synth_walk,
)

J = {n: i for i, n in enumerate(JOINT_NAMES)}


class TestSynthWalk:
    def test_frame_count(self):
        assert synth_walk(4.0, 30.0).n_frames == 120

    def test_hips_antiphase(self):
        walk = synth_walk(4.0, 30.0)
        left = walk.poses[:, J["left_hip"], 0]
        right = walk.poses[:, J["right_hip"], 0]
        assert np.abs(left + right).max() < 1e-9

    def test_determinism(self):
        a, b = synth_walk(4.0, 30.0), synth_walk(4.0, 30.0)
        assert np.array_equal(a.poses, b.poses) and np.array_equal(a.trans, b.trans)

    def test_periodicity_of_rotation_channels(self):
        cfg = GaitConfig(stride_hz=1.0)
        walk = synth_walk(4.0, 30.0, cfg)
        period = 30  # frames per stride
        assert np.abs(walk.poses[period:] - walk.poses[:-period]).max() < 1e-9

    def test_spectrum_below_8hz(self):
        walk = synth_walk(4.0, 30.0)
        t = np.arange(walk.n_frames)
        freqs = np.fft.rfftfreq(walk.n_frames, d=walk.dt)
        channels = np.concatenate([walk.poses.reshape(walk.n_frames, -1), walk.trans], axis=1)
        def high_band_share(x):
            total = (np.abs(np.fft.rfft(x)) ** 2).sum()
            if total < 1e-18:
                return 0.0
            return (np.abs(np.fft.rfft(x)[freqs > 8.0]) ** 2).sum() / total

        for c in range(channels.shape[1]):
            x = channels[:, c]
            # the forward-travel ramp is not periodic; allow removing a linear
            # trend where that represents the channel better than the raw data
            detrended = x - np.polyval(np.polyfit(t, x, 1), t)
            assert min(high_band_share(x), high_band_share(detrended)) < 1e-6

    def test_clean_torques_physiological(self):
        sk = default_skeleton()
        par = build_segment_params(sk)
        dyn = compute_dynamics(sk, par, synth_walk(4.0, 30.0))
        hip_max = max(
            np.linalg.norm(dyn.torque[2:-2, J["left_hip"]], axis=-1).max(),
            np.linalg.norm(dyn.torque[2:-2, J["right_hip"]], axis=-1).max(),
        )
        assert 5.0 <= hip_max <= 100.0


class TestMotionIo:
    def test_round_trip_bit_identical(self, tmp_path):
        walk = synth_walk(4.0, 30.0)
        path = tmp_path / "walk.motion.json"
        save_motion(walk, path)
        back = load_motion(path)
        assert back.fps == walk.fps
        assert np.array_equal(back.poses, walk.poses)
        assert np.array_equal(back.trans, walk.trans)

    def test_wrong_joint_count_names_the_problem(self, tmp_path):
        path = tmp_path / "bad.motion.json"
        doc = {
            "fps": 30.0,
            "frames": [
                {"root_trans": [0, 0, 0], "pose": [[0, 0, 0]] * (24 if k != 1 else 23)}
                for k in range(3)
            ],
        }
        path.write_text(json.dumps(doc))
        with pytest.raises(ParseError, match="expected 24 pose entries"):
            load_motion(path)

    def test_zero_fps_rejected(self, tmp_path):
        path = tmp_path / "bad.motion.json"
        path.write_text(json.dumps({"fps": 0, "frames": []}))
        with pytest.raises(ParseError, match="fps"):
            load_motion(path)

    def test_non_finite_value_located(self, tmp_path):
        path = tmp_path / "bad.motion.json"
        frames = [{"root_trans": [0, 0, 0], "pose": [[0, 0, 0]] * 24} for _ in range(3)]
        frames[2]["pose"][5][1] = 1e999  # serialises as Infinity
        path.write_text(json.dumps(frames and {"fps": 30.0, "frames": frames}))
        with pytest.raises(ParseError, match="frame 2"):
            load_motion(path)

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.motion.json"
        path.write_text("{not json")
        with pytest.raises(ParseError, match="invalid JSON"):
            load_motion(path)
