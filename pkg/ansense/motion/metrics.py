"""
Path length metrics
"""

from typing import Tuple

import numpy as np

from ..core.geometry import quaternion_angle
from ..models.planning import Path


def path_distances(path: Path, rotation_weight: float = 0.1) -> Tuple[float, float]:
    """
    (C-space, workspace) length of a path.

    Workspace length sums positional segment lengths; C-space length adds
    ``rotation_weight`` (meters per radian) times each segment's geodesic angle.
    """
    positions = path.positions()
    steps = np.linalg.norm(np.diff(positions, axis=0), axis=1)
    angles = np.array([quaternion_angle(a.orientation, b.orientation)
                       for a, b in zip(path.waypoints, path.waypoints[1:])])
    workspace = float(steps.sum())
    return workspace + rotation_weight * float(angles.sum()), workspace
