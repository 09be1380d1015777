"""
Planning models: scored candidates, CEM traces and camera paths
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional

import numpy as np

from .camera import Viewpoint


class PolicyKind(str, Enum):
    """Viewpoint generation policies"""
    RANDOM = "random"
    RANDOM_GUIDED = "random_guided"
    BILEVEL_MPC = "bilevel_mpc"
    VPFORMER = "vpformer"


class ScoreModelKind(str, Enum):
    """Score model implementations"""
    ROLLOUT = "rollout"
    HEURISTIC = "heuristic"
    SURROGATE = "surrogate"


@dataclass(frozen=True)
class ScoredViewpoint:
    """A candidate with its predicted coverage (None when the policy does not score)"""
    viewpoint: Viewpoint
    score: Optional[float] = None

    def __post_init__(self):
        """Validate score range"""
        if self.score is not None and not (0.0 <= self.score <= 1.0):
            raise ValueError(f"Score must be in [0, 1], got {self.score}")

    def to_dict(self) -> dict:
        return {"viewpoint": self.viewpoint.to_dict(), "score": self.score}


def sort_scored(candidates: List[ScoredViewpoint]) -> List[ScoredViewpoint]:
    """Stable descending sort by score; earlier candidates win ties"""
    return sorted(candidates, key=lambda c: -c.score)


@dataclass
class MpcIteration:
    """One sample-score-select-refit round"""
    iteration: int
    mu: List[float]
    sigma: List[float]
    sampled: int
    exhausted: bool
    elite_scores: List[float]

    @property
    def best_score(self) -> Optional[float]:
        return self.elite_scores[0] if self.elite_scores else None

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "mu": self.mu,
            "sigma": self.sigma,
            "sampled": self.sampled,
            "exhausted": self.exhausted,
            "elite_scores": self.elite_scores,
        }


@dataclass
class MpcTrace:
    """Per-step diagnostic trace of the bilevel MPC planner"""
    seed_score: Optional[float] = None
    iterations: List[MpcIteration] = field(default_factory=list)

    def best_scores(self) -> List[Optional[float]]:
        return [it.best_score for it in self.iterations]

    def to_dict(self) -> dict:
        return {"seed_score": self.seed_score,
                "iterations": [it.to_dict() for it in self.iterations]}


@dataclass
class SampleBatch:
    """Result of feasible sampling; ``exhausted`` flags a short batch"""
    viewpoints: List[Viewpoint]
    requested: int
    attempts: int

    @property
    def exhausted(self) -> bool:
        return len(self.viewpoints) < self.requested

    def __len__(self) -> int:
        return len(self.viewpoints)


@dataclass(frozen=True, eq=False)
class Path:
    """Camera path; consecutive waypoints are densified to the interpolation step"""
    waypoints: List[Viewpoint]
    grid_stamp: str = ""

    def __post_init__(self):
        """Validate path"""
        if len(self.waypoints) < 2:
            raise ValueError("A path needs at least two waypoints")

    @property
    def start(self) -> Viewpoint:
        return self.waypoints[0]

    @property
    def goal(self) -> Viewpoint:
        return self.waypoints[-1]

    def positions(self) -> np.ndarray:
        return np.asarray([w.position for w in self.waypoints], dtype=np.float64)

    def to_dict(self) -> dict:
        return {"grid_stamp": self.grid_stamp,
                "waypoints": [w.to_dict() for w in self.waypoints]}

    @classmethod
    def from_dict(cls, data: dict) -> 'Path':
        return cls([Viewpoint.from_dict(w) for w in data["waypoints"]], data.get("grid_stamp", ""))


@dataclass
class PathValidation:
    """Outcome of the dense-interpolation validator"""
    ok: bool
    checked: int
    first_failure: Optional[int] = None   # index of the failing segment

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checked": self.checked, "first_failure": self.first_failure}
