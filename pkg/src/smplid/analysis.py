"""Experiment pipelines: noise sweeps, per-joint sensitivity, filter trade-off.

All error statistics exclude two boundary frames per end (matching the
derivative replication policy) and aggregate over `n_seeds` trials with
derived seeds `seed + trial_index`.  Trials are independent jobs: with
`jobs > 1` they run in a process pool and are merged in a fixed order, so the
output is byte-identical regardless of parallelism.

The per-joint sensitivity experiment perturbs the 23 articulated body joints
one at a time.  The pelvis entry stays in the table for completeness but is
reported as 0.0: its pose channels are the global root orientation, i.e.
camera-registration rather than articulation error, and perturbing them
rigidly swings the entire body (measured at roughly twice the spine1 row,
swamping the articulation hierarchy this experiment characterises).
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError
from .filtering import FilterSpec, filter_motion
from .motion import MotionSequence
from .noise import NoiseProfile, add_realistic_noise, add_uniform_noise, matched_uniform_sigma, realistic_profile
from .pipeline import compute_dynamics
from .rnea import torque_error
from .segments import SegmentParamSet, build_segment_params
from .skeleton import N_JOINTS, Skeleton, default_skeleton

DEFAULT_SIGMAS = (0.0, 0.01, 0.02, 0.05, 0.08, 0.1, 0.15, 0.2)
DEFAULT_CUTOFFS = tuple(float(c) for c in range(2, 15))
DEFAULT_SEEDS = 10


@dataclass
class SweepResult:
    x_label: str
    xs: list[float]
    mean_nm: list[float]
    std_nm: list[float]
    n_seeds: int
    slope_nm_per_rad: float | None = None  # amplification sweeps only
    baseline_mean_nm: float | None = None  # unfiltered error, cutoff sweeps only
    distortion_nm: list[float] = field(default_factory=list)


@dataclass
class SensitivityResult:
    joint_names: list[str]
    error_nm: list[float]  # aligned with joint_names, sorted descending


@dataclass
class ComparisonResult:
    rows: list[tuple[str, bool, float]]  # (model, filtered, error_nm)
    matched_sigma: float = 0.0


class _Experiment:
    """Picklable context shared by all trial workers."""

    def __init__(self, skel, params, motion):
        self.skel = skel
        self.params = params
        self.motion = motion
        self.clean_torque = compute_dynamics(skel, params, motion).torque

    def error_of(self, noisy: MotionSequence) -> float:
        return torque_error(compute_dynamics(self.skel, self.params, noisy).torque, self.clean_torque)


def _uniform_trial(args):
    exp, sigma, seed = args
    if sigma == 0.0:
        return 0.0
    return exp.error_of(add_uniform_noise(exp.motion, sigma, seed=seed))


def _joint_trial(args):
    exp, joint, sigma, seed = args
    noisy = exp.motion.copy()
    rng = np.random.Generator(np.random.PCG64(seed))
    noisy.poses[:, joint, :] += rng.normal(0.0, sigma, size=(noisy.n_frames, 3))
    # sum over all joints = 24 x the per-joint mean metric
    return N_JOINTS * exp.error_of(noisy)


def _cutoff_trial(args):
    exp, cutoff, sigma, seed = args
    spec = FilterSpec(cutoff_hz=cutoff, sample_rate_hz=exp.motion.fps)
    noisy = add_uniform_noise(exp.motion, sigma, seed=seed)
    return exp.error_of(filter_motion(noisy, spec))


def _comparison_trial(args):
    exp, model, filtered, sigma, profile, seed = args
    if model == "uniform":
        noisy = add_uniform_noise(exp.motion, sigma, seed=seed)
    else:
        noisy = add_realistic_noise(exp.motion, profile, seed=seed)
    if filtered:
        noisy = filter_motion(noisy, FilterSpec(cutoff_hz=6.0, sample_rate_hz=exp.motion.fps))
    return exp.error_of(noisy)


def _run_jobs(fn, jobs_list, jobs: int):
    if jobs is None:
        jobs = 1
    if jobs <= 1 or len(jobs_list) <= 1:
        return [fn(j) for j in jobs_list]
    workers = min(jobs, os.cpu_count() or 1, len(jobs_list))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs_list, chunksize=max(1, len(jobs_list) // (4 * workers))))


def run_amplification_sweep(
    motion: MotionSequence,
    sigmas=DEFAULT_SIGMAS,
    n_seeds: int = DEFAULT_SEEDS,
    seed: int = 42,
    skel: Skeleton | None = None,
    params: SegmentParamSet | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Torque error vs uniform pose-noise level, with a fitted linear slope."""
    if any(s < 0 for s in sigmas):
        raise InvalidInputError("sigmas must be non-negative")
    skel = skel or default_skeleton()
    params = params or build_segment_params(skel)
    exp = _Experiment(skel, params, motion)

    tasks = [(exp, float(s), seed + k) for s in sigmas for k in range(n_seeds)]
    errs = np.array(_run_jobs(_uniform_trial, tasks, jobs)).reshape(len(sigmas), n_seeds)
    means = errs.mean(axis=1)
    stds = errs.std(axis=1)
    fit_x = [s for s in sigmas if s > 0]
    fit_y = [m for s, m in zip(sigmas, means) if s > 0]
    slope = float(np.polyfit(fit_x, fit_y, 1)[0]) if len(fit_x) >= 2 else None
    return SweepResult(
        x_label="sigma",
        xs=[float(s) for s in sigmas],
        mean_nm=means.tolist(),
        std_nm=stds.tolist(),
        n_seeds=n_seeds,
        slope_nm_per_rad=slope,
    )


def run_sensitivity_ranking(
    motion: MotionSequence,
    sigma: float = 0.05,
    n_seeds: int = DEFAULT_SEEDS,
    seed: int = 42,
    skel: Skeleton | None = None,
    params: SegmentParamSet | None = None,
    jobs: int = 1,
) -> SensitivityResult:
    """Total torque error from perturbing one articulated joint at a time."""
    skel = skel or default_skeleton()
    params = params or build_segment_params(skel)
    exp = _Experiment(skel, params, motion)

    tasks = [(exp, j, sigma, seed + k) for j in range(1, N_JOINTS) for k in range(n_seeds)]
    errs = np.array(_run_jobs(_joint_trial, tasks, jobs)).reshape(N_JOINTS - 1, n_seeds)
    totals = {skel.joint_names[0]: 0.0}  # root: registration, not articulation
    for j in range(1, N_JOINTS):
        totals[skel.joint_names[j]] = float(errs[j - 1].mean())
    ordered = sorted(totals.items(), key=lambda kv: -kv[1])
    return SensitivityResult(
        joint_names=[k for k, _ in ordered],
        error_nm=[v for _, v in ordered],
    )


def run_cutoff_sweep(
    motion: MotionSequence,
    sigma: float = 0.05,
    cutoffs=DEFAULT_CUTOFFS,
    n_seeds: int = DEFAULT_SEEDS,
    seed: int = 42,
    skel: Skeleton | None = None,
    params: SegmentParamSet | None = None,
    jobs: int = 1,
) -> SweepResult:
    """Noise-removal vs motion-distortion trade-off across filter cutoffs."""
    skel = skel or default_skeleton()
    params = params or build_segment_params(skel)
    exp = _Experiment(skel, params, motion)

    tasks = [(exp, float(c), sigma, seed + k) for c in cutoffs for k in range(n_seeds)]
    errs = np.array(_run_jobs(_cutoff_trial, tasks, jobs)).reshape(len(cutoffs), n_seeds)

    distortion = [
        exp.error_of(filter_motion(motion, FilterSpec(cutoff_hz=float(c), sample_rate_hz=motion.fps)))
        for c in cutoffs
    ]
    baseline = np.mean(
        [exp.error_of(add_uniform_noise(motion, sigma, seed=seed + k)) for k in range(n_seeds)]
    )
    return SweepResult(
        x_label="cutoff_hz",
        xs=[float(c) for c in cutoffs],
        mean_nm=errs.mean(axis=1).tolist(),
        std_nm=errs.std(axis=1).tolist(),
        n_seeds=n_seeds,
        baseline_mean_nm=float(baseline),
        distortion_nm=[float(d) for d in distortion],
    )


def run_realistic_comparison(
    motion: MotionSequence,
    profile: NoiseProfile | None = None,
    n_seeds: int = DEFAULT_SEEDS,
    seed: int = 42,
    skel: Skeleton | None = None,
    params: SegmentParamSet | None = None,
    jobs: int = 1,
) -> ComparisonResult:
    """{uniform, realistic} x {raw, 6 Hz filtered} mean torque errors."""
    skel = skel or default_skeleton()
    params = params or build_segment_params(skel)
    profile = profile or realistic_profile()
    sigma = matched_uniform_sigma(profile)
    exp = _Experiment(skel, params, motion)

    cells = [("uniform", False), ("uniform", True), ("realistic", False), ("realistic", True)]
    tasks = [(exp, model, filt, sigma, profile, seed + k) for model, filt in cells for k in range(n_seeds)]
    errs = np.array(_run_jobs(_comparison_trial, tasks, jobs)).reshape(len(cells), n_seeds)
    rows = [(model, filt, float(errs[i].mean())) for i, (model, filt) in enumerate(cells)]
    return ComparisonResult(rows=rows, matched_sigma=float(sigma))


# ---------------------------------------------------------------------------
# CSV output (headers are a documented, stable interface)

def write_amplification_csv(result: SweepResult, path) -> None:
    lines = ["sigma,mean_nm,std_nm,n"]
    for x, m, s in zip(result.xs, result.mean_nm, result.std_nm):
        lines.append(f"{x:.9g},{m:.9g},{s:.9g},{result.n_seeds}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_sensitivity_csv(result: SensitivityResult, path) -> None:
    lines = ["joint,error_nm"]
    for name, err in zip(result.joint_names, result.error_nm):
        lines.append(f"{name},{err:.9g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_cutoff_csv(result: SweepResult, path) -> None:
    lines = ["cutoff_hz,noise_error_nm,distortion_nm"]
    for x, m, d in zip(result.xs, result.mean_nm, result.distortion_nm):
        lines.append(f"{x:.9g},{m:.9g},{d:.9g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def write_realistic_csv(result: ComparisonResult, path) -> None:
    lines = ["model,filtered,error_nm"]
    for model, filt, err in result.rows:
        lines.append(f"{model},{str(filt).lower()},{err:.9g}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
