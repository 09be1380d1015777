"""
Learning-free information-gain score
"""

from typing import Optional, Sequence

import numpy as np

from ..core.config import SensorConfig
from ..models.camera import CameraIntrinsics, Viewpoint
from ..models.grid import BeliefGrid
from ..models.planning import ScoreModelKind
from ..models.registration import BeliefState
from ..scene.coverage import coverage
from ..sensor.camera import optical_center, world_rays
from ..sensor.kernels import unknown_gain_kernel
from .base import BaseScoreModel

_NO_WALLS = np.zeros(6, dtype=np.bool_)


def unknown_voxels_in_view(grid: BeliefGrid, viewpoint: Viewpoint, intr: CameraIntrinsics,
                           closed_faces: Optional[np.ndarray] = None,
                           mount_offset: Sequence[float] = (0.0, 0.0, 0.0)) -> int:
    """Distinct UNKNOWN voxels the pixel rays cross before their first OCCUPIED voxel"""
    dims = grid.dims
    center = optical_center(viewpoint, mount_offset)
    p_vox = (center - dims.origin_array) / dims.resolution
    closed = _NO_WALLS if closed_faces is None else np.asarray(closed_faces, dtype=np.bool_)
    return int(unknown_gain_kernel(grid.state, p_vox, world_rays(intr, viewpoint.orientation),
                                   closed, intr.max_range / dims.resolution))


def heuristic_gain(grid: BeliefGrid, viewpoint: Viewpoint, intr: CameraIntrinsics,
                   closed_faces: Optional[np.ndarray] = None,
                   mount_offset: Sequence[float] = (0.0, 0.0, 0.0)) -> float:
    """
    Current coverage plus the fraction of voxels newly reachable by the view's rays.

    UNKNOWN voxels are transparent and OCCUPIED voxels opaque; rays stop at
    maxRange, at the grid boundary and at closed cabinet walls.

    Returns:
        Score clamped to [0, 1]
    """
    gain = unknown_voxels_in_view(grid, viewpoint, intr, closed_faces, mount_offset) / grid.dims.size
    return float(min(1.0, coverage(grid) + gain))


class HeuristicScore(BaseScoreModel):
    """Frontier-style score: coverage plus visible unknown volume"""

    kind = ScoreModelKind.HEURISTIC

    def __init__(self, sensor: SensorConfig, closed_faces: Optional[np.ndarray] = None):
        super().__init__(sensor)
        self.closed_faces = closed_faces

    def _score_batch(self, belief: BeliefState, viewpoints: Sequence[Viewpoint]) -> np.ndarray:
        return np.array([heuristic_gain(belief.grid, v, self.intrinsics, self.closed_faces,
                                        self.sensor.mount_offset) for v in viewpoints])
