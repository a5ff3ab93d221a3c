"""Differentiable inverse dynamics and noise-propagation analysis on the SMPL joint tree."""

from .derivatives import (
    BOUNDARY_FRAMES,
    KinematicState,
    amplification_gain,
    angular_derivatives,
    linear_derivatives,
)
from .errors import (
    ComputationError,
    ConfigurationError,
    InvalidInputError,
    ParseError,
    SequenceTooShortError,
    SmplidError,
)
from .filtering import FilterSpec, butterworth_coeffs, filter_motion, filtfilt
from .motion import GaitConfig, MotionSequence, load_motion, save_motion, synth_walk
from .noise import (
    NoiseProfile,
    add_realistic_noise,
    add_uniform_noise,
    matched_uniform_sigma,
    realistic_profile,
)
from .analysis import (
    ComparisonResult,
    SensitivityResult,
    SweepResult,
    run_amplification_sweep,
    run_cutoff_sweep,
    run_realistic_comparison,
    run_sensitivity_ranking,
)
from .pipeline import compute_dynamics, compute_kinematics
from .refinement import (
    RefinementConfig,
    RefinementReport,
    physics_loss,
    pose_rms_error,
    refine,
)
from .rnea import DynamicsResult, dynamics_to_csv, inverse_dynamics, torque_error
from .rotations import cross, mat_log, rodrigues
from .segments import (
    SegmentParams,
    SegmentParamSet,
    SegmentSpec,
    build_segment_params,
    default_bsp_table,
    load_bsp_table,
    save_bsp_table,
    world_inertia,
)
from .skeleton import (
    GRAVITY,
    JOINT_NAMES,
    N_JOINTS,
    PARENTS,
    FrameKinematics,
    Pose,
    Skeleton,
    default_skeleton,
    fk_sequence,
    forward_kinematics,
)

__version__ = "0.1.0"
