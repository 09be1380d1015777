"""
Noisy path execution and the executed-pose validation check
"""

import math

import numpy as np

from ..core.config import ExecutionNoiseConfig, MotionConfig
from ..core.geometry import quaternion_angle, small_angle_perturbation
from ..core.utils import STREAM_EXECUTION, derive_rng
from ..models.camera import Viewpoint
from ..models.planning import Path


def execute_with_noise(path: Path, noise: ExecutionNoiseConfig, seed: int) -> Viewpoint:
    """Final waypoint perturbed by Gaussian position and small-angle orientation noise"""
    goal = path.goal
    if noise.sigma_pos == 0 and noise.sigma_ang == 0:
        return goal
    rng = derive_rng(seed, STREAM_EXECUTION)
    position = goal.position_array + rng.normal(0.0, noise.sigma_pos, size=3)
    rotvec = rng.normal(0.0, noise.sigma_ang, size=3)
    quat = small_angle_perturbation(goal.orientation_array, rotvec) if noise.sigma_ang > 0 \
        else goal.orientation_array
    return Viewpoint(tuple(position), tuple(quat))


def within_tolerance(executed: Viewpoint, target: Viewpoint, motion: MotionConfig) -> bool:
    """Position error below ``position_tolerance`` and angle below ``angle_tolerance_deg``"""
    offset = float(np.linalg.norm(executed.position_array - target.position_array))
    angle = quaternion_angle(executed.orientation, target.orientation)
    return offset < motion.position_tolerance and angle < math.radians(motion.angle_tolerance_deg)
