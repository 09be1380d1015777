"""
Collision model of the free-flying camera body

Solid geometry: object boxes (tight bounds of instance points, inflated by the
body radius), one-voxel wall slabs on the closed cabinet faces, and every voxel
still UNKNOWN or OCCUPIED in the belief. The body is a sphere of radius
``body_radius`` and may sit in the staging region or in FREE interior voxels
within the reach sphere around the camera base.
"""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List

import numpy as np

from ..core.config import MotionConfig
from ..core.geometry import AABB
from ..models.camera import Viewpoint
from ..models.grid import BeliefGrid, GridDims, VoxelState
from ..models.registration import InstanceStore
from ..scene.geometry import SceneGeometry
from ..sensor.kernels import spheres_clear_kernel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class CollisionModel:
    """Immutable snapshot of the obstacles a path is planned against"""
    dims: GridDims
    object_boxes: Dict[int, AABB]       # inflated by body_radius
    slabs: List[AABB]                   # inflated by body_radius
    solid: np.ndarray                   # UNKNOWN or OCCUPIED voxels
    free: np.ndarray                    # FREE voxels
    staging: AABB
    reach_center: np.ndarray
    reach_radius: float
    body_radius: float
    grid_stamp: str = ""

    def sampling_box(self) -> AABB:
        """Bound of staging region and grid, clipped to the reach sphere's box"""
        lo = np.maximum(np.minimum(self.dims.origin_array, self.staging.lo_array),
                        self.reach_center - self.reach_radius)
        hi = np.minimum(np.maximum(self.dims.upper, self.staging.hi_array),
                        self.reach_center + self.reach_radius)
        return AABB(tuple(lo), tuple(np.maximum(hi, lo)))

    def _box_arrays(self):
        boxes = list(self.object_boxes.values()) + list(self.slabs)
        if not boxes:
            return np.zeros((0, 3)), np.zeros((0, 3))
        return (np.array([b.lo for b in boxes], dtype=np.float64),
                np.array([b.hi for b in boxes], dtype=np.float64))

    def in_region(self, positions: np.ndarray) -> np.ndarray:
        """Inside the staging region or a FREE interior voxel"""
        pts = np.atleast_2d(np.asarray(positions, dtype=np.float64))
        ok = self.staging.contains(pts)
        idx = self.dims.world_to_index(pts)
        inside = self.dims.in_bounds(idx)
        if inside.any():
            sel = idx[inside]
            ok[inside] |= self.free[sel[:, 0], sel[:, 1], sel[:, 2]]
        return ok

    def in_reach(self, positions: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(positions, dtype=np.float64))
        return np.linalg.norm(pts - self.reach_center, axis=1) <= self.reach_radius

    def clear(self, positions: np.ndarray) -> np.ndarray:
        """Body sphere touches no box and no solid voxel"""
        pts = np.ascontiguousarray(np.atleast_2d(np.asarray(positions, dtype=np.float64)))
        lo, hi = self._box_arrays()
        if len(lo):
            inside = np.all((pts[:, None, :] >= lo[None]) & (pts[:, None, :] <= hi[None]), axis=2)
            ok = ~inside.any(axis=1)
        else:
            ok = np.ones(len(pts), dtype=bool)
        if ok.any():
            ok[ok] = spheres_clear_kernel(self.solid, self.dims.origin_array, self.dims.resolution,
                                          pts[ok], self.body_radius)
        return ok

    def free_positions(self, positions: np.ndarray) -> np.ndarray:
        """Feasibility of many body positions"""
        pts = np.atleast_2d(np.asarray(positions, dtype=np.float64))
        if len(pts) == 0:
            return np.zeros(0, dtype=bool)
        ok = self.in_reach(pts) & self.in_region(pts)
        if ok.any():
            ok[ok] = self.clear(pts[ok])
        return ok

    def is_free(self, pose: Viewpoint) -> bool:
        """Feasibility predicate shared by sampling, planning and execution"""
        return bool(self.free_positions(pose.position_array)[0])

    def release(self, position: np.ndarray) -> 'CollisionModel':
        """Copy without the object boxes that contain ``position`` (a pose swallowed by a grown box)"""
        pts = np.atleast_2d(np.asarray(position, dtype=np.float64))
        kept = {i: box for i, box in self.object_boxes.items() if not box.contains(pts)[0]}
        if len(kept) == len(self.object_boxes):
            return self
        logger.debug(f"Released object boxes {sorted(set(self.object_boxes) - set(kept))} around {pts[0].tolist()}")
        return replace(self, object_boxes=kept)

    def boxes_dict(self) -> Dict[int, dict]:
        """JSON view of the object boxes"""
        return {i: box.to_dict() for i, box in self.object_boxes.items()}

    def to_snapshot(self) -> dict:
        """Everything but the voxel arrays; pair with the source grid to restore"""
        return {
            "object_boxes": {str(i): b for i, b in self.boxes_dict().items()},
            "slabs": [s.to_dict() for s in self.slabs],
            "staging": self.staging.to_dict(),
            "reach_center": self.reach_center.tolist(),
            "reach_radius": self.reach_radius,
            "body_radius": self.body_radius,
            "grid_stamp": self.grid_stamp,
        }

    @classmethod
    def from_snapshot(cls, data: dict, grid: BeliefGrid) -> 'CollisionModel':
        """Rebuild a model recorded with ``to_snapshot`` against its belief grid"""
        return cls(
            dims=grid.dims,
            object_boxes={int(i): AABB.from_dict(b) for i, b in data["object_boxes"].items()},
            slabs=[AABB.from_dict(s) for s in data["slabs"]],
            solid=np.ascontiguousarray(grid.state != VoxelState.FREE),
            free=grid.state == VoxelState.FREE,
            staging=AABB.from_dict(data["staging"]),
            reach_center=np.asarray(data["reach_center"], dtype=np.float64),
            reach_radius=float(data["reach_radius"]),
            body_radius=float(data["body_radius"]),
            grid_stamp=data.get("grid_stamp", grid.stamp),
        )


def build_collision_model(grid: BeliefGrid, store: InstanceStore, geometry: SceneGeometry,
                          motion: MotionConfig) -> CollisionModel:
    """
    Build the collision model of one belief.

    Args:
        grid: Belief grid
        store: Instance store; one box per instance
        geometry: Scene geometry (staging region, reach sphere, wall slabs)
        motion: Body radius

    Returns:
        CollisionModel
    """
    r = motion.body_radius
    boxes = {inst.id: inst.aabb.inflated(r) for inst in store}
    model = CollisionModel(
        dims=grid.dims,
        object_boxes=boxes,
        slabs=[slab.inflated(r) for slab in geometry.slabs],
        solid=np.ascontiguousarray(grid.state != VoxelState.FREE),
        free=grid.state == VoxelState.FREE,
        staging=geometry.staging,
        reach_center=np.asarray(geometry.reach_center, dtype=np.float64),
        reach_radius=geometry.reach_radius,
        body_radius=r,
        grid_stamp=grid.stamp,
    )
    logger.debug(f"Collision model: {len(boxes)} object boxes, {len(model.slabs)} slabs, "
                 f"{int(model.solid.sum())} solid voxels")
    return model
