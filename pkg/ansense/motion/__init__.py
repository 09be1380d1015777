"""Collision models, path planning and execution for the camera body"""

from .collision import CollisionModel, build_collision_model
from .planner import plan_path, validate_path, interpolation_step, segment_points
from .metrics import path_distances
from .execution import execute_with_noise, within_tolerance
from .context import MotionContext, motion_context

__all__ = [
    "CollisionModel", "build_collision_model",
    "plan_path", "validate_path", "interpolation_step", "segment_points",
    "path_distances",
    "execute_with_noise", "within_tolerance",
    "MotionContext", "motion_context",
]
