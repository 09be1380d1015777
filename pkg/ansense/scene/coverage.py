"""
Coverage measure and the ground-truth (oracle) belief grid
"""

import numpy as np

from ..exceptions import MonotonicityError
from ..models.grid import BeliefGrid, NO_INSTANCE, OccupiedOrigin, VoxelState
from ..models.scene import SceneSpec


def coverage(grid: BeliefGrid) -> float:
    """Fraction of voxels whose state is not UNKNOWN (PREDICTED voxels count)"""
    return grid.observed_count / grid.dims.size


def coverage_gain(prev: BeliefGrid, next_grid: BeliefGrid) -> float:
    """
    Fraction of voxels that went from UNKNOWN to observed between two beliefs.

    Args:
        prev: Belief before the update
        next_grid: Belief after the update

    Returns:
        coverage(next_grid) - coverage(prev), computed from integer counts

    Raises:
        GridMismatchError: If the dims differ
        MonotonicityError: If an observed voxel of prev is UNKNOWN in next_grid
    """
    prev.check_compatible(next_grid)
    prev_known = ~prev.unknown_mask
    next_known = ~next_grid.unknown_mask
    regressed = int(np.count_nonzero(prev_known & ~next_known))
    if regressed:
        raise MonotonicityError(f"{regressed} observed voxels returned to UNKNOWN")
    gained = int(np.count_nonzero(next_known & ~prev_known))
    return gained / prev.dims.size


def ground_truth_grid(spec: SceneSpec) -> BeliefGrid:
    """Fully determined grid: objects OCCUPIED/SEEN with their ids, the rest FREE"""
    labels = spec.labels
    occupied = labels >= 0
    state = np.where(occupied, VoxelState.OCCUPIED, VoxelState.FREE).astype(np.uint8)
    origin = np.where(occupied, OccupiedOrigin.SEEN, OccupiedOrigin.NONE).astype(np.uint8)
    instance = np.where(occupied, labels, NO_INSTANCE).astype(np.int32)
    return BeliefGrid(spec.dims, state, origin, instance)
