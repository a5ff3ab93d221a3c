"""Body segment parameters: per-segment mass, center of mass, and inertia.

Mass fractions, center-of-mass locations, and radii of gyration are transcribed
from the de Leva (1996) adjusted Zatsiorsky-Seluyanov tables (male column).
Those tables list ~16 anatomical segments; mapping them onto the 24 SMPL joints
requires a few documented decisions:

  * the trunk is split as lower trunk -> pelvis, and (mid + upper trunk minus a
    shoulder-girdle share) -> spine1/2/3 proportionally to bone length;
  * each collar joint receives a 2% shoulder-girdle share taken from the upper
    trunk;
  * the head+neck segment is split 30% neck / 70% head;
  * hand/foot/head segments sit on their leaf joints and extend along the
    incoming bone direction with a configured leaf length;
  * ankle and wrist joints carry no mass of their own (their distal mass lives
    on the foot/hand leaves).

Every entry is replaceable via a JSON table, so none of these choices are
load-bearing for users with calibrated data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InvalidInputError, ParseError
from .skeleton import N_JOINTS, Skeleton, TEMPLATE_OFFSETS

MASS_SUM_TOL = 1e-3


@dataclass(frozen=True)
class SegmentSpec:
    """Table row: fractions are relative to total body mass / segment length."""

    mass_fraction: float
    com_fraction: float
    r_gyr: tuple[float, float, float]  # sagittal, transverse, longitudinal
    leaf_length_frac: float = 0.0  # fraction of total height; leaves only


def _spine_split() -> tuple[float, float, float]:
    # Mid + upper trunk (minus the collar share) distributed over the three
    # spine bones proportionally to template bone length.
    lengths = np.array(
        [
            np.linalg.norm(TEMPLATE_OFFSETS[6]),  # spine1 -> spine2
            np.linalg.norm(TEMPLATE_OFFSETS[9]),  # spine2 -> spine3
            np.linalg.norm(TEMPLATE_OFFSETS[12]),  # spine3 -> neck
        ]
    )
    trunk_pool = 0.1633 + 0.1596 - 2 * 0.020  # MPT + UPT - both collars
    return tuple(trunk_pool * lengths / lengths.sum())


def default_bsp_table() -> dict[str, SegmentSpec]:
    """Built-in male table (de Leva 1996), mapped to SMPL joints as described above."""
    s1, s2, s3 = _spine_split()
    head_neck = 0.0694
    return {
        "pelvis": SegmentSpec(0.1117, 0.50, (0.615, 0.551, 0.587)),
        "left_hip": SegmentSpec(0.1416, 0.4095, (0.329, 0.329, 0.149)),
        "right_hip": SegmentSpec(0.1416, 0.4095, (0.329, 0.329, 0.149)),
        "spine1": SegmentSpec(s1, 0.45, (0.482, 0.383, 0.468)),
        "left_knee": SegmentSpec(0.0433, 0.4459, (0.255, 0.249, 0.103)),
        "right_knee": SegmentSpec(0.0433, 0.4459, (0.255, 0.249, 0.103)),
        "spine2": SegmentSpec(s2, 0.45, (0.482, 0.383, 0.468)),
        "left_ankle": SegmentSpec(0.0, 0.5, (0.0, 0.0, 0.0)),
        "right_ankle": SegmentSpec(0.0, 0.5, (0.0, 0.0, 0.0)),
        "spine3": SegmentSpec(s3, 0.45, (0.505, 0.320, 0.465)),
        "left_foot": SegmentSpec(0.0137, 0.50, (0.257, 0.245, 0.124), leaf_length_frac=0.075),
        "right_foot": SegmentSpec(0.0137, 0.50, (0.257, 0.245, 0.124), leaf_length_frac=0.075),
        "neck": SegmentSpec(0.30 * head_neck, 0.50, (0.30, 0.30, 0.20)),
        "left_collar": SegmentSpec(0.020, 0.50, (0.40, 0.40, 0.30)),
        "right_collar": SegmentSpec(0.020, 0.50, (0.40, 0.40, 0.30)),
        "head": SegmentSpec(0.70 * head_neck, 0.50, (0.362, 0.376, 0.312), leaf_length_frac=0.07),
        "left_shoulder": SegmentSpec(0.0271, 0.5772, (0.285, 0.269, 0.158)),
        "right_shoulder": SegmentSpec(0.0271, 0.5772, (0.285, 0.269, 0.158)),
        "left_elbow": SegmentSpec(0.0162, 0.4574, (0.276, 0.265, 0.121)),
        "right_elbow": SegmentSpec(0.0162, 0.4574, (0.276, 0.265, 0.121)),
        "left_wrist": SegmentSpec(0.0, 0.5, (0.0, 0.0, 0.0)),
        "right_wrist": SegmentSpec(0.0, 0.5, (0.0, 0.0, 0.0)),
        "left_hand": SegmentSpec(0.0061, 0.79, (0.628, 0.513, 0.401), leaf_length_frac=0.055),
        "right_hand": SegmentSpec(0.0061, 0.79, (0.628, 0.513, 0.401), leaf_length_frac=0.055),
    }


def load_bsp_table(path) -> dict[str, SegmentSpec]:
    """Load a table from JSON: {segment: {mass_fraction, com_fraction, r_gyr_*}}."""
    with open(path) as fh:
        doc = json.load(fh)
    table = {}
    try:
        for name, row in doc.items():
            table[name] = SegmentSpec(
                mass_fraction=float(row["mass_fraction"]),
                com_fraction=float(row["com_fraction"]),
                r_gyr=(
                    float(row["r_gyr_sagittal"]),
                    float(row["r_gyr_transverse"]),
                    float(row["r_gyr_longitudinal"]),
                ),
                leaf_length_frac=float(row.get("leaf_length_frac", 0.0)),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed BSP table: {exc}") from exc
    return table


def save_bsp_table(table: dict[str, SegmentSpec], path) -> None:
    doc = {
        name: {
            "mass_fraction": spec.mass_fraction,
            "com_fraction": spec.com_fraction,
            "r_gyr_sagittal": spec.r_gyr[0],
            "r_gyr_transverse": spec.r_gyr[1],
            "r_gyr_longitudinal": spec.r_gyr[2],
            "leaf_length_frac": spec.leaf_length_frac,
        }
        for name, spec in table.items()
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


@dataclass
class SegmentParams:
    mass: float
    com_offset: np.ndarray  # (3,) CoM in segment-local frame, meters
    inertia_local: np.ndarray  # (3, 3) about the CoM, segment-local axes


class SegmentParamSet:
    """Physical constants for all 24 segments, in joint order."""

    def __init__(self, mass, com_offset, inertia_local, renorm_correction):
        self.mass = mass  # (24,)
        self.com_offset = com_offset  # (24, 3)
        self.inertia_local = inertia_local  # (24, 3, 3)
        self.renorm_correction = renorm_correction  # factor applied to reach sum == 1

    def segment(self, i: int) -> SegmentParams:
        return SegmentParams(self.mass[i], self.com_offset[i], self.inertia_local[i])


def _perpendicular_frame(d: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    helper = np.array([0.0, 1.0, 0.0]) if abs(d[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    u = np.cross(d, helper)
    u /= np.linalg.norm(u)
    return u, np.cross(d, u)


def build_segment_params(skel: Skeleton, table: dict[str, SegmentSpec] | None = None) -> SegmentParamSet:
    """Assign mass, CoM offset, and local inertia to every joint's segment."""
    if table is None:
        table = default_bsp_table()
    missing = [n for n in skel.joint_names if n not in table]
    if missing:
        raise ConfigurationError(f"BSP table missing segments: {missing}")

    fractions = np.array([table[n].mass_fraction for n in skel.joint_names])
    if np.any(fractions < 0):
        raise ConfigurationError("mass fractions must be non-negative")
    total = fractions.sum()
    if abs(total - 1.0) > MASS_SUM_TOL:
        raise ConfigurationError(f"mass fractions sum to {total:.6f}, expected 1 within {MASS_SUM_TOL}")
    correction = 1.0 / total
    fractions = fractions * correction

    mass = fractions * skel.total_mass
    com_offset = np.zeros((N_JOINTS, 3))
    inertia = np.zeros((N_JOINTS, 3, 3))

    for i, name in enumerate(skel.joint_names):
        spec = table[name]
        if skel.children[i]:
            vec = skel.offsets[skel.children[i][0]]
            length = float(np.linalg.norm(vec))
        else:
            vec = skel.offsets[i]
            length = spec.leaf_length_frac * skel.total_height
        norm = float(np.linalg.norm(vec))
        if length == 0.0 or norm == 0.0:
            continue
        d = vec / norm
        com_offset[i] = spec.com_fraction * length * d
        u, v = _perpendicular_frame(d)
        r_sag, r_trans, r_long = spec.r_gyr
        m_l2 = mass[i] * length * length
        inertia[i] = m_l2 * (
            r_sag**2 * np.outer(u, u) + r_trans**2 * np.outer(v, v) + r_long**2 * np.outer(d, d)
        )

    return SegmentParamSet(mass, com_offset, inertia, correction)


def world_inertia(inertia_local: np.ndarray, rot: np.ndarray) -> np.ndarray:
    """World-frame inertia about the CoM: R I R^T (broadcasts over leading dims)."""
    inertia_local = np.asarray(inertia_local, dtype=float)
    rot = np.asarray(rot, dtype=float)
    if rot.shape[-2:] != (3, 3) or inertia_local.shape[-2:] != (3, 3):
        raise InvalidInputError("expected (..., 3, 3) matrices")
    return rot @ inertia_local @ np.swapaxes(rot, -1, -2)
