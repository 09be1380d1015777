"""
Episode models: step records, episode logs and benchmark metrics
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple

import numpy as np

from .camera import Observation, Viewpoint
from .grid import BeliefGrid
from .planning import MpcTrace, Path


class EpisodeStatus(str, Enum):
    """Terminal status of an episode"""
    SUCCESS = "success"
    STEP_LIMIT = "step_limit"
    PLANNING_FAILURE = "planning_failure"


@dataclass
class StepRecord:
    """One iteration of the active sensing loop"""
    t: int
    viewpoint: Viewpoint                 # v_best
    executed: Viewpoint                  # v_real
    predicted: Optional[float]
    coverage: float
    planning_seconds: float
    cspace: float
    workspace: float
    candidates_tried: int
    discarded: bool = False
    path: Optional[Path] = None
    features: Optional[np.ndarray] = None
    observation: Optional[Observation] = None
    grid: Optional[BeliefGrid] = None            # belief after the step
    collision_grid: Optional[BeliefGrid] = None  # belief the path was planned against
    collision_snapshot: Optional[dict] = None
    mpc_trace: Optional[MpcTrace] = None        # bilevel MPC steps only

    def to_dict(self) -> dict:
        """Seed-determined fields only (no wall-clock time)"""
        return {
            "t": self.t,
            "viewpoint": self.viewpoint.to_dict(),
            "executed": self.executed.to_dict(),
            "predicted": self.predicted,
            "coverage": self.coverage,
            "cspace": self.cspace,
            "workspace": self.workspace,
            "candidates_tried": self.candidates_tried,
            "discarded": self.discarded,
            "path": self.path.to_dict() if self.path is not None else None,
        }


@dataclass
class EpisodeLog:
    """Ordered step records plus the terminal status of one episode"""
    scene_seed: int
    policy: str
    start_viewpoint: Viewpoint
    scene_volume: float = 0.0
    initial_coverage: float = 0.0
    initial_features: Optional[np.ndarray] = None
    steps: List[StepRecord] = field(default_factory=list)
    status: Optional[EpisodeStatus] = None
    chamfer: Dict[int, float] = field(default_factory=dict)        # per completed instance
    instance_points: Dict[int, np.ndarray] = field(default_factory=dict)  # final store, with snapshots

    @property
    def accepted_steps(self) -> List[StepRecord]:
        return [s for s in self.steps if not s.discarded]

    @property
    def num_viewpoints(self) -> int:
        return len(self.accepted_steps)

    @property
    def discarded_count(self) -> int:
        return sum(1 for s in self.steps if s.discarded)

    @property
    def coverage_curve(self) -> List[float]:
        return [s.coverage for s in self.accepted_steps]

    @property
    def final_coverage(self) -> float:
        curve = self.coverage_curve
        return curve[-1] if curve else self.initial_coverage

    @property
    def planning_seconds(self) -> float:
        return float(sum(s.planning_seconds for s in self.steps))

    @property
    def cspace(self) -> float:
        return float(sum(s.cspace for s in self.accepted_steps))

    @property
    def workspace(self) -> float:
        return float(sum(s.workspace for s in self.accepted_steps))

    @property
    def success(self) -> bool:
        return self.status == EpisodeStatus.SUCCESS

    @property
    def mean_chamfer(self) -> Optional[float]:
        if not self.chamfer:
            return None
        return float(np.mean(list(self.chamfer.values())))

    def is_monotone(self) -> bool:
        """Coverage never decreases across accepted steps"""
        curve = [self.initial_coverage] + self.coverage_curve
        return all(b >= a for a, b in zip(curve, curve[1:]))

    def to_dict(self) -> dict:
        return {
            "scene_seed": self.scene_seed,
            "policy": self.policy,
            "status": self.status.value if self.status else None,
            "start_viewpoint": self.start_viewpoint.to_dict(),
            "scene_volume": self.scene_volume,
            "initial_coverage": self.initial_coverage,
            "num_viewpoints": self.num_viewpoints,
            "discarded": self.discarded_count,
            "final_coverage": self.final_coverage,
            "cspace": self.cspace,
            "workspace": self.workspace,
            "chamfer": {str(i): d for i, d in sorted(self.chamfer.items())},
            "steps": [s.to_dict() for s in self.steps],
        }


@dataclass
class EpisodeSummary:
    """One metrics.csv row"""
    policy: str
    scene_seed: int
    volume: float
    bucket: str
    viewpoints: int
    success: bool
    status: str
    final_coverage: float
    cspace: float
    workspace: float
    planning_seconds: float = 0.0
    chamfer: Optional[float] = None

    CSV_FIELDS = ("policy", "scene_seed", "volume", "bucket", "viewpoints", "success",
                  "status", "final_coverage", "cspace", "workspace", "chamfer")

    def csv_row(self, with_timing: bool = False) -> List:
        row = [self.policy, self.scene_seed, repr(float(self.volume)), self.bucket, self.viewpoints,
               int(self.success), self.status, repr(float(self.final_coverage)),
               repr(float(self.cspace)), repr(float(self.workspace))]
        row.append("" if self.chamfer is None else repr(float(self.chamfer)))
        if with_timing:
            row.append(repr(float(self.planning_seconds)))
        return row


@dataclass
class PolicyMetrics:
    """Aggregate metrics of one policy over the benchmark scenes"""
    policy: str
    episodes: int
    viewpoints: Tuple[float, float]
    success_rate: float
    planning_seconds: Tuple[float, float]
    cspace: Tuple[float, float]
    workspace: Tuple[float, float]
    coverage_curve: List[float]
    volume_buckets: Dict[str, float]
    chamfer: Optional[Tuple[float, float]] = None

    def to_dict(self, with_timing: bool = False) -> dict:
        data = {
            "policy": self.policy,
            "episodes": self.episodes,
            "viewpoints_mean": self.viewpoints[0],
            "viewpoints_std": self.viewpoints[1],
            "success_rate": self.success_rate,
            "cspace_mean": self.cspace[0],
            "cspace_std": self.cspace[1],
            "workspace_mean": self.workspace[0],
            "workspace_std": self.workspace[1],
            "coverage_curve": self.coverage_curve,
            "volume_buckets": self.volume_buckets,
        }
        if self.chamfer is not None:
            data["chamfer_mean"] = self.chamfer[0]
            data["chamfer_std"] = self.chamfer[1]
        if with_timing:
            data["planning_seconds_mean"] = self.planning_seconds[0]
            data["planning_seconds_std"] = self.planning_seconds[1]
        return data


@dataclass
class MetricsTable:
    """Benchmark result: one row per policy plus per-episode summaries"""
    rows: List[PolicyMetrics] = field(default_factory=list)
    episodes: List[EpisodeSummary] = field(default_factory=list)
    volume_edges: Tuple[float, float] = (0.0, 0.0)
    scene_seeds: List[int] = field(default_factory=list)

    def row(self, policy: str) -> PolicyMetrics:
        for r in self.rows:
            if r.policy == policy:
                return r
        raise KeyError(policy)

    def to_dict(self, with_timing: bool = False) -> dict:
        return {
            "rows": [r.to_dict(with_timing) for r in self.rows],
            "volume_edges": list(self.volume_edges),
            "scene_seeds": list(self.scene_seeds),
        }


@dataclass
class BenchmarkRun:
    """Aggregate table plus the episode logs it was computed from"""
    table: MetricsTable
    logs: List[EpisodeLog] = field(default_factory=list)
    label: str = ""
