"""
Derived scene geometry: opening plane, staging region, camera base and walls
"""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from ..core.config import MotionConfig
from ..core.geometry import AABB, look_along
from ..models.camera import Viewpoint
from ..models.scene import OpeningFace, SceneSpec


@dataclass(frozen=True, eq=False)
class SceneGeometry:
    """Everything the planners need to know about the cabinet besides the belief"""
    grid_box: AABB
    opening_face: OpeningFace
    staging: AABB
    reach_center: np.ndarray
    reach_radius: float
    slabs: List[AABB]
    closed_faces: np.ndarray

    @property
    def inward(self) -> np.ndarray:
        """Unit normal pointing from the opening into the cabinet"""
        return -self.opening_face.outward

    @property
    def planning_box(self) -> AABB:
        """Bound of every position the camera body may occupy"""
        lo = np.maximum(np.minimum(self.grid_box.lo_array, self.staging.lo_array),
                        self.reach_center - self.reach_radius)
        hi = np.minimum(np.maximum(self.grid_box.hi_array, self.staging.hi_array),
                        self.reach_center + self.reach_radius)
        return AABB(tuple(lo), tuple(np.maximum(hi, lo)))

    def start_viewpoint(self) -> Viewpoint:
        """Camera at the base (reach centre) looking into the cabinet"""
        quat = look_along(self.inward[None, :], np.zeros(1))[0]
        return Viewpoint(tuple(self.reach_center), tuple(quat))


def _face_slabs(grid_box: AABB, closed_faces: np.ndarray, thickness: float) -> List[AABB]:
    """One-voxel-thick wall boxes just outside every closed face"""
    slabs = []
    lo, hi = grid_box.lo_array, grid_box.hi_array
    for face in range(6):
        if not closed_faces[face]:
            continue
        axis, upper = divmod(face, 2)
        s_lo = lo - thickness
        s_hi = hi + thickness
        if upper:
            s_lo[axis] = hi[axis]
            s_hi[axis] = hi[axis] + thickness
        else:
            s_lo[axis] = lo[axis] - thickness
            s_hi[axis] = lo[axis]
        slabs.append(AABB(tuple(s_lo), tuple(s_hi)))
    return slabs


def scene_geometry(spec: SceneSpec, motion: Optional[MotionConfig] = None) -> SceneGeometry:
    """
    Derive the planning geometry of a scene.

    The staging region extends ``staging_depth`` outward from the opening over the
    full opening cross-section. The camera base sits ``-base_offset[0]`` outward of
    the opening plane, shifted by ``base_offset[1]`` along the first lateral axis.

    Args:
        spec: Scene
        motion: Motion configuration (defaults used when omitted)

    Returns:
        SceneGeometry
    """
    motion = motion or MotionConfig()
    dims = spec.dims
    face = spec.opening_face
    grid_box = AABB(tuple(dims.origin_array), tuple(dims.upper))
    lo, hi = grid_box.lo_array.copy(), grid_box.hi_array.copy()
    axis, sign = face.axis, face.sign
    plane = hi[axis] if sign > 0 else lo[axis]

    st_lo, st_hi = lo.copy(), hi.copy()
    if sign > 0:
        st_lo[axis], st_hi[axis] = plane, plane + motion.staging_depth
    else:
        st_lo[axis], st_hi[axis] = plane - motion.staging_depth, plane
    staging = AABB(tuple(st_lo), tuple(st_hi))

    lateral = [a for a in range(3) if a != axis]
    center = (lo + hi) / 2.0
    base = center.copy()
    base[axis] = plane + sign * (-spec.base_offset[0])
    base[lateral[0]] = center[lateral[0]] + spec.base_offset[1]

    return SceneGeometry(
        grid_box=grid_box,
        opening_face=face,
        staging=staging,
        reach_center=base,
        reach_radius=motion.reach_radius,
        slabs=_face_slabs(grid_box, spec.closed_faces, dims.resolution),
        closed_faces=spec.closed_faces,
    )
