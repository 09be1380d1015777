"""
Learning models: score training pairs, token sequences and expert data
"""

from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from .camera import Viewpoint


@dataclass(frozen=True, eq=False)
class TrainingPair:
    """(grid features, viewpoint features, coverage label) sample"""
    grid_features: np.ndarray
    view_features: np.ndarray
    label: float
    scene_seed: int = 0

    def __post_init__(self):
        """Validate label"""
        if not 0.0 <= self.label <= 1.0:
            raise ValueError(f"Training label must be in [0, 1], got {self.label}")

    def to_dict(self) -> dict:
        return {"grid": self.grid_features.tolist(), "view": self.view_features.tolist(),
                "label": self.label, "scene_seed": self.scene_seed}

    @classmethod
    def from_dict(cls, data: dict) -> 'TrainingPair':
        return cls(np.asarray(data["grid"], dtype=np.float64),
                   np.asarray(data["view"], dtype=np.float64),
                   float(data["label"]), int(data.get("scene_seed", 0)))


@dataclass
class TrainingCorpus:
    """Shuffled pairs with the recorded train/eval split"""
    train: List[TrainingPair]
    eval: List[TrainingPair]
    scene_seeds: List[int] = field(default_factory=list)

    @property
    def pairs(self) -> List[TrainingPair]:
        return self.train + self.eval

    def __len__(self) -> int:
        return len(self.train) + len(self.eval)


@dataclass(frozen=True, eq=False)
class TokenStep:
    """(cumulative coverage, coarse belief features, viewpoint) token"""
    coverage: float
    features: np.ndarray
    viewpoint: Viewpoint

    def to_dict(self) -> dict:
        return {"c": self.coverage, "S": self.features.tolist(), "v": self.viewpoint.to_dict()}

    @classmethod
    def from_dict(cls, data: dict) -> 'TokenStep':
        return cls(float(data["c"]), np.asarray(data["S"], dtype=np.float64),
                   Viewpoint.from_dict(data["v"]))


@dataclass(frozen=True, eq=False)
class TokenSequence:
    """
    Ordered tokens plus the position box the model's output is squashed into.

    ``bounds`` is ((lo_x, lo_y, lo_z), (hi_x, hi_y, hi_z)) in world meters.
    """
    steps: Tuple[TokenStep, ...]
    bounds: Tuple[Tuple[float, float, float], Tuple[float, float, float]]
    max_len: int = 8

    def __post_init__(self):
        """Validate sequence"""
        object.__setattr__(self, "steps", tuple(self.steps))
        if len(self.steps) < 1:
            raise ValueError("TokenSequence needs at least one token")
        if len(self.steps) > self.max_len:
            raise ValueError(f"TokenSequence length {len(self.steps)} exceeds max_len {self.max_len}")
        coverages = [s.coverage for s in self.steps]
        if any(b < a for a, b in zip(coverages, coverages[1:])):
            raise ValueError("Token coverages must be non-decreasing")

    def __len__(self) -> int:
        return len(self.steps)

    def appended(self, step: TokenStep) -> 'TokenSequence':
        return TokenSequence(self.steps + (step,), self.bounds, self.max_len)

    def truncated(self, length: int) -> 'TokenSequence':
        return TokenSequence(self.steps[:length], self.bounds, self.max_len)

    def to_dict(self) -> dict:
        return {"steps": [s.to_dict() for s in self.steps],
                "bounds": [list(self.bounds[0]), list(self.bounds[1])],
                "max_len": self.max_len}

    @classmethod
    def from_dict(cls, data: dict) -> 'TokenSequence':
        lo, hi = data["bounds"]
        return cls(tuple(TokenStep.from_dict(s) for s in data["steps"]),
                   (tuple(lo), tuple(hi)), int(data.get("max_len", 8)))


@dataclass(frozen=True, eq=False)
class ExpertTrajectory:
    """Token sequence with the executed next viewpoint after every token"""
    tokens: TokenSequence
    targets: Tuple[Viewpoint, ...]
    scene_seed: int = 0

    def __post_init__(self):
        """Validate alignment"""
        if len(self.targets) != len(self.tokens):
            raise ValueError("Expert trajectory needs one target per token")

    def to_dict(self) -> dict:
        return {"tokens": self.tokens.to_dict(),
                "targets": [t.to_dict() for t in self.targets],
                "scene_seed": self.scene_seed}

    @classmethod
    def from_dict(cls, data: dict) -> 'ExpertTrajectory':
        return cls(TokenSequence.from_dict(data["tokens"]),
                   tuple(Viewpoint.from_dict(t) for t in data["targets"]),
                   int(data.get("scene_seed", 0)))


@dataclass
class ExpertDataset:
    """Behaviour-cloning corpus recorded from bilevel MPC episodes"""
    trajectories: List[ExpertTrajectory] = field(default_factory=list)
    skipped: int = 0

    def __len__(self) -> int:
        return len(self.trajectories)


@dataclass
class TrainingHistory:
    """Per-epoch loss history; eval losses include the initial (epoch 0) value"""
    train_loss: List[float] = field(default_factory=list)
    eval_loss: List[float] = field(default_factory=list)
    best_epoch: int = 0

    @property
    def initial_eval(self) -> Optional[float]:
        return self.eval_loss[0] if self.eval_loss else None

    @property
    def best_eval(self) -> Optional[float]:
        return self.eval_loss[self.best_epoch] if self.eval_loss else None

    def to_dict(self) -> dict:
        return {"train_loss": self.train_loss, "eval_loss": self.eval_loss,
                "best_epoch": self.best_epoch}
