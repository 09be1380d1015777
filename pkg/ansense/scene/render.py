"""
Orthographic colour-coded projections of a belief grid
"""

from typing import Dict

import numpy as np

from ..models.grid import BeliefGrid, OccupiedOrigin, VoxelState

# Display priority along a projection column (higher wins).
_PRIORITY_FREE = 0
_PRIORITY_UNKNOWN = 1
_PRIORITY_PREDICTED = 2
_PRIORITY_SEEN = 3

PALETTE = np.array([
    [235, 235, 235],   # FREE
    [90, 90, 90],      # UNKNOWN
    [235, 140, 40],    # PREDICTED
    [40, 110, 220],    # SEEN
], dtype=np.uint8)

AXIS_NAMES = ("x", "y", "z")


def priority_grid(grid: BeliefGrid) -> np.ndarray:
    """Per-voxel display class"""
    out = np.full(grid.dims.shape, _PRIORITY_FREE, dtype=np.uint8)
    out[grid.state == VoxelState.UNKNOWN] = _PRIORITY_UNKNOWN
    occupied = grid.state == VoxelState.OCCUPIED
    out[occupied & (grid.origin_flag == OccupiedOrigin.PREDICTED)] = _PRIORITY_PREDICTED
    out[occupied & (grid.origin_flag == OccupiedOrigin.SEEN)] = _PRIORITY_SEEN
    return out


def orthographic_views(grid: BeliefGrid) -> Dict[str, np.ndarray]:
    """
    Project the belief along each axis.

    Each pixel shows the highest-priority class in its column
    (SEEN > PREDICTED > UNKNOWN > FREE). Images are flipped so the second
    remaining axis points up.

    Returns:
        {"x": (nz, ny, 3), "y": (nz, nx, 3), "z": (ny, nx, 3)} uint8 RGB arrays
    """
    classes = priority_grid(grid)
    views = {}
    for axis, name in enumerate(AXIS_NAMES):
        projected = classes.max(axis=axis)      # remaining axes in increasing order
        image = PALETTE[projected.T[::-1]]
        views[name] = np.ascontiguousarray(image)
    return views
