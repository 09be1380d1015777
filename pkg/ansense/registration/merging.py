"""
Threshold-based instance merging
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np
from scipy.spatial import cKDTree
from scipy.spatial.distance import cdist

from ..models.registration import InstanceRecord, InstanceStore, PartialCloud

logger = logging.getLogger(__name__)

_CHUNK = 2048


def min_pair_distance(a: np.ndarray, b: np.ndarray, accelerated: bool = False) -> float:
    """
    Smallest point-to-point distance between two non-empty point sets.

    The brute-force path scans chunked distance blocks; the accelerated path
    queries a KD-tree built on ``b``.
    """
    if accelerated:
        distances, _ = cKDTree(b).query(a, k=1)
        return float(np.min(distances))
    best = np.inf
    for start in range(0, len(a), _CHUNK):
        best = min(best, float(cdist(a[start:start + _CHUNK], b, "sqeuclidean").min()))
    return float(np.sqrt(best))


def merge_with_assignments(store: InstanceStore, clouds: Sequence[PartialCloud], eta: float,
                           accelerated: bool = False) -> Tuple[InstanceStore, List[int]]:
    """
    Merge clouds into the store, returning the store id each cloud went to.

    Clouds are processed in the given order; each is compared with every instance
    present at that moment (including instances created by earlier clouds).
    """
    if eta <= 0:
        raise ValueError("Merging threshold eta must be positive")
    assignments = []
    for cloud in clouds:
        best_id, best_distance = -1, np.inf
        for inst in store:
            distance = min_pair_distance(cloud.points, inst.points, accelerated)
            if distance < best_distance:
                best_id, best_distance = inst.id, distance
        hints = frozenset() if cloud.instance_hint is None else frozenset({cloud.instance_hint})
        if best_id >= 0 and best_distance < eta:
            inst = store.get(best_id)
            points = np.unique(np.vstack([inst.points, cloud.points]), axis=0)
            record = InstanceRecord(inst.id, points, inst.hints | hints, inst.predicted_count)
            logger.debug(f"Merged cloud ({len(cloud)} pts) into instance {best_id} at {best_distance:.4f} m")
        else:
            record = InstanceRecord(len(store), np.unique(cloud.points, axis=0), hints)
            logger.debug(f"New instance {record.id} from cloud of {len(cloud)} points")
        store = store.with_instance(record)
        assignments.append(record.id)
    return store, assignments


def merge_instances(store: InstanceStore, clouds: Sequence[PartialCloud], eta: float,
                    accelerated: bool = False) -> InstanceStore:
    """
    Append each cloud to its nearest instance when the minimum point distance is
    below ``eta``; otherwise start a new instance.

    Args:
        store: Current instances
        clouds: New partial clouds in segmentation order
        eta: Merging threshold in meters
        accelerated: Use KD-tree distance queries

    Returns:
        Updated InstanceStore
    """
    return merge_with_assignments(store, clouds, eta, accelerated)[0]
