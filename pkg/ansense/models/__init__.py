"""Domain models for the Ansense simulator"""

from .camera import CameraIntrinsics, Viewpoint, Observation
from .grid import GridDims, BeliefGrid, VoxelState, OccupiedOrigin, NO_INSTANCE
from .scene import SceneSpec, GroundTruthObject, ObjectShape, OpeningFace
from .registration import PartialCloud, NormalizedCloud, InstanceRecord, InstanceStore, BeliefState
from .planning import (
    PolicyKind, ScoreModelKind, ScoredViewpoint, MpcTrace, MpcIteration, SampleBatch,
    Path, PathValidation, sort_scored
)
from .episode import (
    EpisodeStatus, StepRecord, EpisodeLog, EpisodeSummary, PolicyMetrics, MetricsTable, BenchmarkRun
)
from .learning import (
    TrainingPair, TrainingCorpus, TokenStep, TokenSequence, ExpertTrajectory, ExpertDataset,
    TrainingHistory
)

__all__ = [
    "CameraIntrinsics", "Viewpoint", "Observation",
    "GridDims", "BeliefGrid", "VoxelState", "OccupiedOrigin", "NO_INSTANCE",
    "SceneSpec", "GroundTruthObject", "ObjectShape", "OpeningFace",
    "PartialCloud", "NormalizedCloud", "InstanceRecord", "InstanceStore", "BeliefState",
    "PolicyKind", "ScoreModelKind", "ScoredViewpoint", "MpcTrace", "MpcIteration", "SampleBatch",
    "Path", "PathValidation", "sort_scored",
    "EpisodeStatus", "StepRecord", "EpisodeLog", "EpisodeSummary", "PolicyMetrics", "MetricsTable",
    "BenchmarkRun",
    "TrainingPair", "TrainingCorpus", "TokenStep", "TokenSequence", "ExpertTrajectory",
    "ExpertDataset", "TrainingHistory",
]
