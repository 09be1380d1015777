"""
Registration models: partial clouds, the instance store and the belief state
"""

from dataclasses import dataclass, field, replace
from typing import Dict, FrozenSet, Optional, Tuple

import numpy as np

from ..core.geometry import AABB
from .grid import BeliefGrid


@dataclass(frozen=True, eq=False)
class PartialCloud:
    """Points of one segmented instance in one observation (world frame)"""
    points: np.ndarray
    instance_hint: Optional[int] = None

    def __post_init__(self):
        """Validate cloud"""
        pts = np.asarray(self.points, dtype=np.float64).reshape(-1, 3)
        if len(pts) == 0:
            raise ValueError("PartialCloud must be non-empty")
        object.__setattr__(self, "points", pts)

    def __len__(self) -> int:
        return len(self.points)


@dataclass(frozen=True, eq=False)
class NormalizedCloud:
    """Points in the unit ball: (p - center) / scale"""
    points: np.ndarray
    center: np.ndarray
    scale: float

    def denormalize(self, points: Optional[np.ndarray] = None) -> np.ndarray:
        """Map normalised points (default: this cloud's) back to world frame"""
        pts = self.points if points is None else np.asarray(points, dtype=np.float64)
        return pts * self.scale + self.center


@dataclass(frozen=True, eq=False)
class InstanceRecord:
    """Accumulated geometry of one scene-level instance"""
    id: int
    points: np.ndarray
    hints: FrozenSet[int] = frozenset()
    predicted_count: int = 0

    @property
    def aabb(self) -> AABB:
        """Tight bound of the accumulated points"""
        return AABB.from_points(self.points)

    @property
    def point_count(self) -> int:
        return int(len(self.points))

    def to_dict(self) -> dict:
        box = self.aabb
        return {
            "id": self.id,
            "point_count": self.point_count,
            "aabb": box.to_dict(),
            "predicted_voxels": self.predicted_count,
            "hints": sorted(self.hints),
        }


@dataclass(frozen=True, eq=False)
class InstanceStore:
    """Scene instances keyed by contiguous ids starting at 0"""
    instances: Tuple[InstanceRecord, ...] = ()

    def __len__(self) -> int:
        return len(self.instances)

    def __iter__(self):
        return iter(self.instances)

    def get(self, instance_id: int) -> InstanceRecord:
        return self.instances[instance_id]

    @property
    def ids(self) -> list:
        return [inst.id for inst in self.instances]

    def boxes(self) -> Dict[int, AABB]:
        return {inst.id: inst.aabb for inst in self.instances}

    def with_instance(self, record: InstanceRecord) -> 'InstanceStore':
        """Replace (same id) or append (next id) one record"""
        items = list(self.instances)
        if record.id < len(items):
            items[record.id] = record
        elif record.id == len(items):
            items.append(record)
        else:
            raise ValueError(f"Instance ids must stay contiguous, got {record.id} for store of {len(items)}")
        return InstanceStore(tuple(items))

    def with_predicted_counts(self, counts: Dict[int, int]) -> 'InstanceStore':
        return InstanceStore(tuple(replace(inst, predicted_count=counts.get(inst.id, inst.predicted_count))
                                   for inst in self.instances))

    def to_dict(self) -> dict:
        return {"instances": [inst.to_dict() for inst in self.instances]}


@dataclass(frozen=True, eq=False)
class BeliefState:
    """What the robot knows: the voxel belief plus the instance store"""
    grid: BeliefGrid
    store: InstanceStore = field(default_factory=InstanceStore)

    @classmethod
    def wrap(cls, belief) -> 'BeliefState':
        """Accept either a BeliefState or a bare BeliefGrid"""
        if isinstance(belief, BeliefState):
            return belief
        return cls(belief)
