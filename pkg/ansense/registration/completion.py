"""
Object-wise shape completion, normalisation and Chamfer evaluation
"""

import logging
from typing import Dict

import numpy as np
from scipy.spatial import cKDTree

from ..exceptions import RegistrationError
from ..models.grid import BeliefGrid
from ..models.registration import InstanceStore, NormalizedCloud, PartialCloud
from ..models.scene import SceneSpec

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-9


def normalize_partial(cloud: PartialCloud, volume_cap: float) -> NormalizedCloud:
    """
    Centre a cloud on its mean and scale by the cube root of ``volume_cap``.

    Raises:
        RegistrationError: If the cloud is empty or does not fit the unit ball
    """
    if volume_cap <= 0:
        raise ValueError("volume_cap must be positive")
    points = np.asarray(cloud.points, dtype=np.float64)
    if len(points) == 0:
        raise RegistrationError("Cannot normalise an empty cloud")
    center = points.mean(axis=0)
    scale = float(np.cbrt(volume_cap))
    normalized = (points - center) / scale
    radius = float(np.linalg.norm(normalized, axis=1).max())
    if radius > 1.0 + NORM_TOLERANCE:
        raise RegistrationError(
            f"Cloud extends {radius:.3f} normalised units from its mean; volume_cap {volume_cap} is too small")
    return NormalizedCloud(normalized, center, scale)


def denormalize(normalized: NormalizedCloud) -> np.ndarray:
    """Exact inverse of normalize_partial"""
    return normalized.denormalize()


def complete_instance(points: np.ndarray, grid: BeliefGrid) -> np.ndarray:
    """
    Predict the hidden volume of one instance.

    The instance points are voxelised and every currently UNKNOWN voxel inside
    the tight AABB of those voxels is returned; FREE and OCCUPIED voxels are
    never returned.

    Args:
        points: (N, 3) accumulated instance points (world)
        grid: Current belief

    Returns:
        (K, 3) voxel indices to mark OCCUPIED/PREDICTED
    """
    points = np.asarray(points, dtype=np.float64)
    if len(points) == 0:
        raise RegistrationError("Cannot complete an empty instance")
    dims = grid.dims
    indices = dims.world_to_index(points)
    indices = indices[dims.in_bounds(indices)]
    if len(indices) == 0:
        return np.zeros((0, 3), dtype=np.int64)
    lo = indices.min(axis=0)
    hi = indices.max(axis=0) + 1
    block = grid.unknown_mask[lo[0]:hi[0], lo[1]:hi[1], lo[2]:hi[2]]
    return np.argwhere(block) + lo


def chamfer(a: np.ndarray, b: np.ndarray) -> float:
    """
    Symmetric L2 Chamfer distance with squared nearest-neighbour distances.

    Raises:
        RegistrationError: If either set is empty
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1, 3)
    b = np.asarray(b, dtype=np.float64).reshape(-1, 3)
    if len(a) == 0 or len(b) == 0:
        raise RegistrationError("Chamfer distance needs two non-empty point sets")
    d_ab, _ = cKDTree(b).query(a, k=1)
    d_ba, _ = cKDTree(a).query(b, k=1)
    return float(np.mean(d_ab ** 2) + np.mean(d_ba ** 2))


def evaluate_completion(store: InstanceStore, grid: BeliefGrid, spec: SceneSpec,
                        volume_cap: float = 0.016) -> Dict[int, float]:
    """
    Chamfer distance between each completed instance and its ground-truth object.

    Completed geometry is the instance's seen points plus the centres of its
    PREDICTED voxels; the ground truth is the object's voxel centres. Both are
    expressed in the instance's normalisation frame. Instances whose ground-truth
    hint is unknown are skipped.

    Returns:
        {store instance id: chamfer distance}
    """
    results = {}
    objects = {obj.id: obj for obj in spec.objects}
    for inst in store:
        hints = [h for h in sorted(inst.hints) if h in objects]
        if not hints:
            continue
        # merged instances may exceed the unit ball, so the frame is not range-checked
        center = inst.points.mean(axis=0)
        scale = float(np.cbrt(volume_cap))
        predicted = np.argwhere(grid.predicted_mask & (grid.instance == inst.id))
        completed = np.vstack([inst.points, grid.dims.voxel_centers(predicted)]) if len(predicted) \
            else inst.points
        truth = np.vstack([grid.dims.voxel_centers(objects[h].voxels) for h in hints])
        results[inst.id] = chamfer((completed - center) / scale, (truth - center) / scale)
    logger.debug(f"Evaluated completion for {len(results)} instances")
    return results
