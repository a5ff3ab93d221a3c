import numpy as np
import pytest

import smplid as sm
from smplid.analysis import (
    run_amplification_sweep,
    run_cutoff_sweep,
    run_realistic_comparison,
    run_sensitivity_ranking,
    write_amplification_csv,
    write_cutoff_csv,
    write_realistic_csv,
    write_sensitivity_csv,
)

SK = sm.default_skeleton()
PAR = sm.build_segment_params(SK)
WALK = sm.synth_walk(4.0, 30.0)


class TestAmplificationSweep:
    def test_zero_sigma_has_zero_error(self):
        res = run_amplification_sweep(WALK, sigmas=(0.0, 0.05), n_seeds=2, skel=SK, params=PAR)
        assert res.mean_nm[0] == 0.0
        assert res.std_nm[0] == 0.0

    def test_mean_and_std_match_naive_recomputation(self):
        sigmas, n = (0.05,), 3
        res = run_amplification_sweep(WALK, sigmas=sigmas, n_seeds=n, seed=7, skel=SK, params=PAR)
        clean = sm.compute_dynamics(SK, PAR, WALK).torque
        errs = []
        for k in range(n):
            noisy = sm.add_uniform_noise(WALK, 0.05, seed=7 + k)
            errs.append(sm.torque_error(sm.compute_dynamics(SK, PAR, noisy).torque, clean))
        assert res.mean_nm[0] == pytest.approx(np.mean(errs), rel=1e-12)
        assert res.std_nm[0] == pytest.approx(np.std(errs), rel=1e-12)

    def test_row_count_and_slope(self, tmp_path):
        res = run_amplification_sweep(WALK, sigmas=(0.0, 0.02, 0.05), n_seeds=2, skel=SK, params=PAR)
        assert len(res.xs) == 3
        assert res.slope_nm_per_rad is not None and res.slope_nm_per_rad > 0
        path = tmp_path / "amplification.csv"
        write_amplification_csv(res, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "sigma,mean_nm,std_nm,n"
        assert len(lines) == 1 + 3

    def test_jobs_do_not_change_results(self):
        a = run_amplification_sweep(WALK, sigmas=(0.05,), n_seeds=2, skel=SK, params=PAR, jobs=1)
        b = run_amplification_sweep(WALK, sigmas=(0.05,), n_seeds=2, skel=SK, params=PAR, jobs=2)
        assert a.mean_nm == b.mean_nm and a.std_nm == b.std_nm


class TestSensitivityRanking:
    @pytest.fixture(scope="class")
    @staticmethod
    def result():
        return run_sensitivity_ranking(WALK, n_seeds=2, skel=SK, params=PAR)

    def test_has_24_rows(self, result, tmp_path):
        assert len(result.joint_names) == 24
        path = tmp_path / "sensitivity.csv"
        write_sensitivity_csv(result, path)
        assert len(path.read_text().strip().split("\n")) == 25

    def test_spine1_ranks_first(self, result):
        assert result.joint_names[0] == "spine1"

    def test_group_hierarchy(self, result):
        err = dict(zip(result.joint_names, result.error_nm))
        spine = np.mean([err["spine1"], err["spine2"], err["spine3"]])
        hips = np.mean([err["left_hip"], err["right_hip"]])
        distal = np.mean([err["left_wrist"], err["right_wrist"], err["left_hand"], err["right_hand"]])
        assert spine > hips > distal
        assert spine >= 5.0 * distal

    def test_root_reported_as_registration_not_articulation(self, result):
        err = dict(zip(result.joint_names, result.error_nm))
        assert err["pelvis"] == 0.0


class TestCutoffSweep:
    @pytest.fixture(scope="class")
    @staticmethod
    def result():
        return run_cutoff_sweep(WALK, n_seeds=2, skel=SK, params=PAR)

    def test_rows_match_cutoffs(self, result, tmp_path):
        assert len(result.xs) == 13  # 2..14 Hz
        path = tmp_path / "cutoff.csv"
        write_cutoff_csv(result, path)
        assert len(path.read_text().strip().split("\n")) == 14

    def test_six_hz_beats_unfiltered_by_40_percent(self, result):
        six = result.mean_nm[result.xs.index(6.0)]
        assert six <= 0.6 * result.baseline_mean_nm

    def test_low_cutoff_distorts_more(self, result):
        assert result.distortion_nm[result.xs.index(2.0)] > result.distortion_nm[result.xs.index(10.0)]

    def test_noise_error_rises_above_six_hz(self, result):
        idx6 = result.xs.index(6.0)
        seg = result.mean_nm[idx6:]
        assert all(seg[i] <= seg[i + 1] + 1e-9 for i in range(len(seg) - 1))


class TestRealisticComparison:
    @pytest.fixture(scope="class")
    @staticmethod
    def result():
        return run_realistic_comparison(WALK, n_seeds=3, skel=SK, params=PAR)

    def test_four_cells(self, result, tmp_path):
        assert len(result.rows) == 4
        path = tmp_path / "realistic.csv"
        write_realistic_csv(result, path)
        lines = path.read_text().strip().split("\n")
        assert lines[0] == "model,filtered,error_nm"
        assert len(lines) == 5

    def test_realistic_raw_exceeds_uniform_raw(self, result):
        cells = {(m, f): e for m, f, e in result.rows}
        assert cells[("realistic", False)] > cells[("uniform", False)]

    def test_filtering_reduces_both_models_below_60_percent(self, result):
        cells = {(m, f): e for m, f, e in result.rows}
        assert cells[("uniform", True)] < 0.6 * cells[("uniform", False)]
        assert cells[("realistic", True)] < 0.6 * cells[("realistic", False)]

    def test_determinism(self, result):
        again = run_realistic_comparison(WALK, n_seeds=3, skel=SK, params=PAR)
        assert again.rows == result.rows
