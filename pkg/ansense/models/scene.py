"""
Ground-truth scene models
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import List, Tuple

import numpy as np

from .grid import GridDims


class OpeningFace(str, Enum):
    """Cabinet face left open for the camera"""
    NEG_X = "-x"
    POS_X = "+x"
    NEG_Y = "-y"
    POS_Y = "+y"
    NEG_Z = "-z"
    POS_Z = "+z"

    @property
    def axis(self) -> int:
        return "xyz".index(self.value[1])

    @property
    def sign(self) -> int:
        """Outward direction along the axis"""
        return -1 if self.value[0] == "-" else 1

    @property
    def index(self) -> int:
        """Face index used by the ray kernels: 2 * axis + (1 for the upper face)"""
        return 2 * self.axis + (1 if self.sign > 0 else 0)

    @property
    def outward(self) -> np.ndarray:
        normal = np.zeros(3)
        normal[self.axis] = self.sign
        return normal


class ObjectShape(str, Enum):
    """Procedural object primitives"""
    BOX = "box"
    CYLINDER = "cylinder"
    SPHERE = "sphere"
    L_PRISM = "l_prism"


@dataclass(frozen=True, eq=False)
class GroundTruthObject:
    """One placed object; pose is (x, y, bottom z) plus yaw, sizes in meters"""
    id: int
    shape: ObjectShape
    position: Tuple[float, float, float]
    yaw: float
    size: Tuple[float, float, float]
    voxels: np.ndarray

    def __post_init__(self):
        """Validate object"""
        if len(self.voxels) == 0:
            raise ValueError(f"Object {self.id} has no voxels")

    @property
    def voxel_count(self) -> int:
        return int(len(self.voxels))

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "shape": self.shape.value,
            "position": list(self.position),
            "yaw": self.yaw,
            "size": list(self.size),
            "voxel_count": self.voxel_count,
        }


@dataclass(frozen=True, eq=False)
class SceneSpec:
    """The hidden world: cabinet grid, opening, objects"""
    dims: GridDims
    opening_face: OpeningFace
    cabinet_height: float
    objects: List[GroundTruthObject] = field(default_factory=list)
    seed: int = 0
    extents: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    base_offset: Tuple[float, float] = (-0.3, 0.0)

    @property
    def volume(self) -> float:
        """Interior volume in m^3"""
        ex, ey, ez = self.dims.extent
        return ex * ey * ez

    @property
    def object_count(self) -> int:
        return len(self.objects)

    @cached_property
    def labels(self) -> np.ndarray:
        """int32 grid of ground-truth instance ids, -1 where free"""
        labels = np.full(self.dims.shape, -1, dtype=np.int32)
        for obj in self.objects:
            idx = obj.voxels
            labels[idx[:, 0], idx[:, 1], idx[:, 2]] = obj.id
        labels.setflags(write=False)
        return labels

    @cached_property
    def closed_faces(self) -> np.ndarray:
        """Boolean per face index; True where a wall blocks rays"""
        closed = np.ones(6, dtype=np.bool_)
        closed[self.opening_face.index] = False
        closed.setflags(write=False)
        return closed
