"""
Voxel grid models: dimensions and the three-state belief grid
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import Optional, Tuple

import numpy as np

from ..core.utils import array_stamp
from ..exceptions import GridMismatchError


class VoxelState(IntEnum):
    """Per-voxel belief"""
    UNKNOWN = 0
    FREE = 1
    OCCUPIED = 2


class OccupiedOrigin(IntEnum):
    """Where an OCCUPIED label came from"""
    NONE = 0
    SEEN = 1
    PREDICTED = 2


NO_INSTANCE = -1


@dataclass(frozen=True)
class GridDims:
    """Voxel counts, resolution (m/voxel) and world origin of the grid's min corner"""
    nx: int
    ny: int
    nz: int
    resolution: float
    origin: Tuple[float, float, float] = (0.0, 0.0, 0.0)

    def __post_init__(self):
        """Validate dimensions"""
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        if min(self.nx, self.ny, self.nz) < 1:
            raise ValueError("Grid voxel counts must be at least 1")
        if self.resolution <= 0:
            raise ValueError("Grid resolution must be positive")

    @property
    def shape(self) -> Tuple[int, int, int]:
        return (self.nx, self.ny, self.nz)

    @property
    def size(self) -> int:
        return self.nx * self.ny * self.nz

    @property
    def extent(self) -> Tuple[float, float, float]:
        return (self.nx * self.resolution, self.ny * self.resolution, self.nz * self.resolution)

    @property
    def origin_array(self) -> np.ndarray:
        return np.asarray(self.origin, dtype=np.float64)

    @property
    def upper(self) -> np.ndarray:
        return self.origin_array + np.asarray(self.extent)

    def voxel_centers(self, indices: Optional[np.ndarray] = None) -> np.ndarray:
        """World centres of the given (N, 3) indices, or of every voxel in C order"""
        if indices is None:
            indices = np.indices(self.shape).reshape(3, -1).T
        return self.origin_array + (np.asarray(indices, dtype=np.float64) + 0.5) * self.resolution

    def world_to_index(self, points: np.ndarray) -> np.ndarray:
        """Integer voxel indices containing each (N, 3) point (may fall outside)"""
        pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.floor((pts - self.origin_array) / self.resolution).astype(np.int64)

    def in_bounds(self, indices: np.ndarray) -> np.ndarray:
        idx = np.atleast_2d(indices)
        return np.all((idx >= 0) & (idx < np.asarray(self.shape)), axis=1)

    def to_dict(self) -> dict:
        return {"nx": self.nx, "ny": self.ny, "nz": self.nz,
                "resolution": self.resolution, "origin": list(self.origin)}

    @classmethod
    def from_dict(cls, data: dict) -> 'GridDims':
        return cls(int(data["nx"]), int(data["ny"]), int(data["nz"]),
                   float(data["resolution"]), tuple(data["origin"]))


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class BeliefGrid:
    """
    Immutable three-state voxel belief.

    ``state`` holds VoxelState codes, ``origin_flag`` holds OccupiedOrigin codes
    (NONE unless OCCUPIED) and ``instance`` holds instance ids (-1 unless OCCUPIED).
    Updates build new grids through ``with_arrays``.
    """
    dims: GridDims
    state: np.ndarray
    origin_flag: np.ndarray
    instance: np.ndarray

    def __post_init__(self):
        """Validate array shapes and freeze private copies of the arrays"""
        for name in ("state", "origin_flag", "instance"):
            arr = getattr(self, name)
            if arr.shape != self.dims.shape:
                raise GridMismatchError(f"{name} shape {arr.shape} != grid dims {self.dims.shape}")
        object.__setattr__(self, "state", _frozen(np.array(self.state, dtype=np.uint8, order="C")))
        object.__setattr__(self, "origin_flag", _frozen(np.array(self.origin_flag, dtype=np.uint8, order="C")))
        object.__setattr__(self, "instance", _frozen(np.array(self.instance, dtype=np.int32, order="C")))

    @classmethod
    def unknown(cls, dims: GridDims) -> 'BeliefGrid':
        """Grid with every voxel UNKNOWN"""
        return cls(dims,
                   np.zeros(dims.shape, dtype=np.uint8),
                   np.zeros(dims.shape, dtype=np.uint8),
                   np.full(dims.shape, NO_INSTANCE, dtype=np.int32))

    @classmethod
    def filled(cls, dims: GridDims, state: VoxelState) -> 'BeliefGrid':
        """Grid with every voxel in one non-OCCUPIED state"""
        grid = cls.unknown(dims)
        return grid.with_arrays(state=np.full(dims.shape, int(state), dtype=np.uint8))

    def mutable_copy(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Writable copies of (state, origin_flag, instance)"""
        return self.state.copy(), self.origin_flag.copy(), self.instance.copy()

    def with_arrays(self, state: Optional[np.ndarray] = None,
                    origin_flag: Optional[np.ndarray] = None,
                    instance: Optional[np.ndarray] = None) -> 'BeliefGrid':
        return BeliefGrid(self.dims,
                          self.state if state is None else state,
                          self.origin_flag if origin_flag is None else origin_flag,
                          self.instance if instance is None else instance)

    @property
    def observed_count(self) -> int:
        return int(np.count_nonzero(self.state != VoxelState.UNKNOWN))

    @property
    def unknown_mask(self) -> np.ndarray:
        return self.state == VoxelState.UNKNOWN

    @property
    def free_mask(self) -> np.ndarray:
        return self.state == VoxelState.FREE

    @property
    def occupied_mask(self) -> np.ndarray:
        return self.state == VoxelState.OCCUPIED

    @property
    def seen_mask(self) -> np.ndarray:
        return self.occupied_mask & (self.origin_flag == OccupiedOrigin.SEEN)

    @property
    def predicted_mask(self) -> np.ndarray:
        return self.occupied_mask & (self.origin_flag == OccupiedOrigin.PREDICTED)

    @property
    def stamp(self) -> str:
        """Content digest identifying this belief"""
        return array_stamp(self.state, self.origin_flag, self.instance)

    def check_compatible(self, other: 'BeliefGrid') -> None:
        if self.dims != other.dims:
            raise GridMismatchError(f"Grid dims differ: {self.dims} vs {other.dims}")

    def validate(self) -> None:
        """Check the per-voxel label invariants"""
        occupied = self.occupied_mask
        if np.any(self.origin_flag[~occupied] != OccupiedOrigin.NONE):
            raise ValueError("Origin flag set on a non-OCCUPIED voxel")
        if np.any(self.instance[~occupied] != NO_INSTANCE):
            raise ValueError("Instance id set on a non-OCCUPIED voxel")
        if np.any(self.instance[self.predicted_mask] < 0):
            raise ValueError("PREDICTED voxel without an instance id")
        if np.any(self.origin_flag[occupied] == OccupiedOrigin.NONE):
            raise ValueError("OCCUPIED voxel without an origin flag")
