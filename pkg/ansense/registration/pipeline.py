"""
Scene registration pipeline: segment, merge, carve, complete
"""

import logging
from typing import Tuple

import numpy as np

from ..core.config import RegistrationConfig
from ..models.camera import CameraIntrinsics, Observation
from ..models.grid import BeliefGrid, OccupiedOrigin, VoxelState
from ..models.registration import BeliefState, InstanceStore
from ..sensor.camera import carve_visibility
from .completion import complete_instance
from .merging import merge_with_assignments
from .segmentation import segment_oracle

logger = logging.getLogger(__name__)


def complete_all(grid: BeliefGrid, store: InstanceStore) -> Tuple[BeliefGrid, InstanceStore]:
    """Mark every instance's predicted voxels, instances processed in id order"""
    if len(store) == 0:
        return grid, store
    state, origin_flag, instance = grid.mutable_copy()
    for inst in store:
        current = grid.with_arrays(state, origin_flag, instance)
        voxels = complete_instance(inst.points, current)
        if len(voxels) == 0:
            continue
        idx = (voxels[:, 0], voxels[:, 1], voxels[:, 2])
        state[idx] = VoxelState.OCCUPIED
        origin_flag[idx] = OccupiedOrigin.PREDICTED
        instance[idx] = inst.id
    completed = grid.with_arrays(state, origin_flag, instance)
    counts = np.bincount(completed.instance[completed.predicted_mask], minlength=len(store))
    return completed, store.with_predicted_counts({i: int(c) for i, c in enumerate(counts)})


def integrate_observation(grid: BeliefGrid, obs: Observation, store: InstanceStore,
                          config: RegistrationConfig, intr: CameraIntrinsics,
                          seed: int = 0) -> Tuple[BeliefGrid, InstanceStore]:
    """
    Register one observation into the belief.

    Pipeline: segment_oracle -> merge_instances -> carve_visibility (hits labelled
    with their store ids) -> optional object-wise completion.

    Args:
        grid: Current belief grid
        obs: New observation
        store: Current instance store
        config: Registration settings (eta, miss_prob, completion_on, ...)
        intr: Intrinsics of the observation
        seed: Segmentation seed

    Returns:
        (updated grid, updated store)
    """
    clouds = segment_oracle(obs, config.miss_prob, seed, intr)
    store, assignments = merge_with_assignments(store, clouds, config.eta, config.accelerated)
    instance_map = {cloud.instance_hint: store_id for cloud, store_id in zip(clouds, assignments)}
    grid = carve_visibility(grid, obs, intr, instance_map)
    if config.completion_on:
        grid, store = complete_all(grid, store)
    logger.debug(f"Integrated observation: {len(clouds)} clouds, {len(store)} instances")
    return grid, store


def integrate_belief(belief: BeliefState, obs: Observation, config: RegistrationConfig,
                     intr: CameraIntrinsics, seed: int = 0) -> BeliefState:
    """BeliefState wrapper around integrate_observation"""
    grid, store = integrate_observation(belief.grid, obs, belief.store, config, intr, seed)
    return BeliefState(grid, store)
