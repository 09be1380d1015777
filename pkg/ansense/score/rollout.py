"""
Ground-truth coverage labels by simulated observation
"""

import logging
from typing import Optional, Sequence

import numpy as np

from ..core.config import RegistrationConfig, SensorConfig
from ..exceptions import InfeasibleViewpointError, ScoreModelError, SensorError
from ..models.camera import CameraIntrinsics, Viewpoint
from ..models.grid import BeliefGrid
from ..models.planning import ScoreModelKind
from ..models.registration import BeliefState, InstanceStore
from ..models.scene import SceneSpec
from ..registration.pipeline import integrate_observation
from ..scene.coverage import coverage
from ..sensor.camera import render_depth
from .base import BaseScoreModel

logger = logging.getLogger(__name__)


def rollout_belief(spec: SceneSpec, belief: BeliefState, viewpoint: Viewpoint, intr: CameraIntrinsics,
                   reg_config: RegistrationConfig, mount_offset: Sequence[float] = (0.0, 0.0, 0.0),
                   seed: int = 0) -> BeliefState:
    """
    Belief after observing the ground truth from ``viewpoint``.

    Raises:
        InfeasibleViewpointError: If the camera would sit inside an object
    """
    try:
        obs = render_depth(spec, viewpoint, intr, mount_offset)
    except SensorError as e:
        raise InfeasibleViewpointError(str(e)) from e
    grid, store = integrate_observation(belief.grid, obs, belief.store, reg_config, intr, seed)
    return BeliefState(grid, store)


def label_rollout(spec: SceneSpec, grid: BeliefGrid, viewpoint: Viewpoint, intr: CameraIntrinsics,
                  reg_config: RegistrationConfig, store: Optional[InstanceStore] = None,
                  mount_offset: Sequence[float] = (0.0, 0.0, 0.0), seed: int = 0) -> float:
    """
    Coverage the belief would reach after observing from ``viewpoint``.

    Renders the ground truth, registers the observation into a copy of the belief
    and returns the resulting coverage; the inputs are not modified.

    Raises:
        InfeasibleViewpointError: If the camera would sit inside an object
    """
    belief = BeliefState(grid, store or InstanceStore())
    return coverage(rollout_belief(spec, belief, viewpoint, intr, reg_config, mount_offset, seed).grid)


class RolloutLabeler(BaseScoreModel):
    """Exact score by simulation; needs the ground-truth scene attached"""

    kind = ScoreModelKind.ROLLOUT

    def __init__(self, sensor: SensorConfig, registration: RegistrationConfig,
                 spec: Optional[SceneSpec] = None, seed: int = 0):
        super().__init__(sensor)
        self.registration = registration
        self.spec = spec
        self.seed = seed

    def attach(self, spec: SceneSpec) -> 'RolloutLabeler':
        """Attach the oracle scene"""
        self.spec = spec
        return self

    def _score_batch(self, belief: BeliefState, viewpoints: Sequence[Viewpoint]) -> np.ndarray:
        if self.spec is None:
            raise ScoreModelError("Rollout labelling requires an attached ground-truth scene")
        return np.array([label_rollout(self.spec, belief.grid, v, self.intrinsics, self.registration,
                                       belief.store, self.sensor.mount_offset, self.seed)
                         for v in viewpoints])
