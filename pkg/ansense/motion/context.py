"""
Motion context handed to the viewpoint generators
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

from ..core.config import MotionConfig
from ..models.registration import BeliefState
from ..scene.geometry import SceneGeometry
from .collision import CollisionModel, build_collision_model


@dataclass(frozen=True, eq=False)
class MotionContext:
    """Collision model of the current belief plus the scene geometry it was built from"""
    model: CollisionModel
    geometry: SceneGeometry
    motion: MotionConfig
    mount_offset: Tuple[float, float, float] = (0.0, 0.0, 0.0)


def motion_context(belief: BeliefState, geometry: SceneGeometry, motion: MotionConfig,
                   mount_offset: Sequence[float] = (0.0, 0.0, 0.0)) -> MotionContext:
    return MotionContext(build_collision_model(belief.grid, belief.store, geometry, motion),
                         geometry, motion, tuple(float(v) for v in mount_offset))
