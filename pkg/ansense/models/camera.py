"""
Camera models: poses, intrinsics and rendered observations
"""

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Tuple

import numpy as np

UNIT_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CameraIntrinsics:
    """Pinhole intrinsics; optical axis +z, image x right, image y down"""
    hfov: float = 70.25          # degrees
    width: int = 80
    height: int = 45
    max_range: float = 2.0       # meters

    def __post_init__(self):
        """Validate intrinsics"""
        if not 0.0 < self.hfov < 180.0:
            raise ValueError("Horizontal field of view must be in (0, 180) degrees")
        if self.width < 1 or self.height < 1:
            raise ValueError("Image width and height must be at least 1 pixel")
        if self.max_range <= 0:
            raise ValueError("max_range must be positive")

    @property
    def fx(self) -> float:
        return (self.width / 2.0) / math.tan(math.radians(self.hfov) / 2.0)

    @property
    def fy(self) -> float:
        return self.fx

    @property
    def cx(self) -> float:
        return self.width / 2.0

    @property
    def cy(self) -> float:
        return self.height / 2.0

    @property
    def vfov(self) -> float:
        """Vertical field of view in degrees, derived from the aspect ratio"""
        return math.degrees(2.0 * math.atan((self.height / 2.0) / self.fy))

    def camera_rays(self) -> np.ndarray:
        """(H, W, 3) unit ray directions in the camera frame through pixel centres"""
        jj, ii = np.meshgrid(np.arange(self.width) + 0.5, np.arange(self.height) + 0.5)
        rays = np.stack([(jj - self.cx) / self.fx, (ii - self.cy) / self.fy,
                         np.ones_like(jj)], axis=-1)
        return rays / np.linalg.norm(rays, axis=-1, keepdims=True)


@dataclass(frozen=True)
class Viewpoint:
    """7D camera pose: position (meters) and unit quaternion (w, x, y, z)"""
    position: Tuple[float, float, float]
    orientation: Tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        """Validate pose"""
        object.__setattr__(self, "position", tuple(float(v) for v in self.position))
        object.__setattr__(self, "orientation", tuple(float(v) for v in self.orientation))
        if len(self.position) != 3 or len(self.orientation) != 4:
            raise ValueError("Viewpoint needs a 3D position and a 4D quaternion")
        if not all(math.isfinite(v) for v in self.position + self.orientation):
            raise ValueError(f"Viewpoint has non-finite coordinates: {self.position}, {self.orientation}")
        norm = math.sqrt(sum(v * v for v in self.orientation))
        if abs(norm - 1.0) > UNIT_TOLERANCE:
            raise ValueError(f"Viewpoint quaternion is not unit norm ({norm})")

    @classmethod
    def from_vector(cls, vector: Iterable[float], normalize: bool = True) -> 'Viewpoint':
        """Build from a 7-vector (x, y, z, qw, qx, qy, qz), renormalising the quaternion"""
        vec = np.asarray(list(vector), dtype=np.float64)
        if vec.shape != (7,):
            raise ValueError(f"Expected a 7-vector, got shape {vec.shape}")
        quat = vec[3:]
        if normalize:
            norm = np.linalg.norm(quat)
            if not np.isfinite(norm) or norm < 1e-12:
                raise ValueError("Cannot normalise a zero quaternion")
            quat = quat / norm
        return cls(tuple(vec[:3]), tuple(quat))

    def as_vector(self) -> np.ndarray:
        return np.asarray(self.position + self.orientation, dtype=np.float64)

    @property
    def position_array(self) -> np.ndarray:
        return np.asarray(self.position, dtype=np.float64)

    @property
    def orientation_array(self) -> np.ndarray:
        return np.asarray(self.orientation, dtype=np.float64)

    def to_dict(self) -> dict:
        return {"position": list(self.position), "orientation": list(self.orientation)}

    @classmethod
    def from_dict(cls, data: dict) -> 'Viewpoint':
        return cls(tuple(data["position"]), tuple(data["orientation"]))


@dataclass(eq=False)
class Observation:
    """Depth image (meters, inf = no hit within range) and instance-id image (-1 = none)"""
    viewpoint: Viewpoint
    depth: np.ndarray
    instance: np.ndarray
    optical_center: Optional[Tuple[float, float, float]] = None
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        """Validate image shapes"""
        if self.depth.shape != self.instance.shape or self.depth.ndim != 2:
            raise ValueError("Depth and instance images must share one 2D shape")
        if self.optical_center is None:
            self.optical_center = self.viewpoint.position

    @property
    def shape(self) -> Tuple[int, int]:
        return self.depth.shape

    @property
    def hit_mask(self) -> np.ndarray:
        return np.isfinite(self.depth)

    @property
    def object_mask(self) -> np.ndarray:
        return self.instance >= 0

    def visible_instances(self) -> list:
        """Sorted ground-truth ids visible in the image"""
        return [int(i) for i in np.unique(self.instance[self.instance >= 0])]
