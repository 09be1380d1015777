"""
Ansense Score Model Interface

A score model predicts the coverage a belief would reach after observing from a
candidate viewpoint.
"""

import logging
from abc import ABC, abstractmethod
from typing import Sequence, Union

import numpy as np

from ..core.config import SensorConfig
from ..models.camera import Viewpoint
from ..models.grid import BeliefGrid
from ..models.planning import ScoreModelKind
from ..models.registration import BeliefState

logger = logging.getLogger(__name__)

Belief = Union[BeliefState, BeliefGrid]


class BaseScoreModel(ABC):
    """Base class for coverage score models"""

    kind: ScoreModelKind

    def __init__(self, sensor: SensorConfig):
        self.sensor = sensor
        self.intrinsics = sensor.intrinsics
        self.call_count: int = 0
        self.evaluated_count: int = 0

    @abstractmethod
    def _score_batch(self, belief: BeliefState, viewpoints: Sequence[Viewpoint]) -> np.ndarray:
        """Scores in [0, 1] for each viewpoint, in input order"""
        pass

    def predict(self, belief: Belief, viewpoints: Sequence[Viewpoint]) -> np.ndarray:
        """
        Score a batch of viewpoints against the current belief.

        Args:
            belief: BeliefState, or a bare BeliefGrid with an empty instance store
            viewpoints: Candidates

        Returns:
            (N,) float64 predicted coverages in [0, 1], input order
        """
        self.call_count += 1
        viewpoints = list(viewpoints)
        self.evaluated_count += len(viewpoints)
        if not viewpoints:
            return np.zeros(0)
        scores = np.asarray(self._score_batch(BeliefState.wrap(belief), viewpoints), dtype=np.float64)
        return np.clip(scores, 0.0, 1.0)

    def predict_one(self, belief: Belief, viewpoint: Viewpoint) -> float:
        return float(self.predict(belief, [viewpoint])[0])

    def reset_counters(self):
        """Reset call instrumentation"""
        self.call_count = 0
        self.evaluated_count = 0


class ConstantScore(BaseScoreModel):
    """Scores every candidate with the same value; useful for tie-rule checks"""

    kind = ScoreModelKind.HEURISTIC

    def __init__(self, value: float = 0.5, sensor: SensorConfig = None):
        super().__init__(sensor or SensorConfig())
        if not 0.0 <= value <= 1.0:
            raise ValueError("Constant score must be in [0, 1]")
        self.value = value

    def _score_batch(self, belief: BeliefState, viewpoints: Sequence[Viewpoint]) -> np.ndarray:
        return np.full(len(viewpoints), self.value)
