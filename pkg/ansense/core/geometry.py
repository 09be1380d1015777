"""
Geometry helpers shared by the sensor, planners and motion modules.

Quaternions are stored scalar-first (w, x, y, z) throughout the package; scipy's
Rotation uses scalar-last, so every conversion goes through this module.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from scipy.spatial.transform import Rotation, Slerp

Vec3 = Tuple[float, float, float]

_EZ = np.array([0.0, 0.0, 1.0])


def to_scipy(q_wxyz: np.ndarray) -> np.ndarray:
    """(…, 4) scalar-first -> scalar-last"""
    q = np.asarray(q_wxyz, dtype=np.float64)
    return np.concatenate([q[..., 1:], q[..., :1]], axis=-1)


def from_scipy(q_xyzw: np.ndarray) -> np.ndarray:
    """(…, 4) scalar-last -> scalar-first"""
    q = np.asarray(q_xyzw, dtype=np.float64)
    return np.concatenate([q[..., 3:], q[..., :3]], axis=-1)


def rotation_matrix(q_wxyz) -> np.ndarray:
    """Camera-to-world rotation matrix of a unit quaternion"""
    return Rotation.from_quat(to_scipy(q_wxyz)).as_matrix()


def canonical_quaternion(q: np.ndarray) -> np.ndarray:
    """Pick the representative with w >= 0 of the double cover"""
    q = np.asarray(q, dtype=np.float64)
    sign = np.where(q[..., :1] < 0.0, -1.0, 1.0)
    return q * sign


def quaternion_angle(q1, q2) -> float:
    """Geodesic angle (radians) between two orientations"""
    dot = abs(float(np.dot(np.asarray(q1, dtype=np.float64), np.asarray(q2, dtype=np.float64))))
    return 2.0 * float(np.arccos(min(1.0, dot)))


def quaternion_multiply(q1, q2) -> np.ndarray:
    """Hamilton product q1 * q2 (scalar-first)"""
    w1, x1, y1, z1 = q1
    w2, x2, y2, z2 = q2
    return np.array([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ])


def slerp(q1, q2, fractions) -> np.ndarray:
    """Spherical interpolation between two orientations at fractions in [0, 1]"""
    fractions = np.clip(np.asarray(fractions, dtype=np.float64), 0.0, 1.0)
    key = Rotation.from_quat(np.stack([to_scipy(q1), to_scipy(q2)]))
    interp = Slerp([0.0, 1.0], key)
    out = from_scipy(interp(fractions).as_quat())
    # keep the hemisphere of the start orientation so paths are continuous
    signs = np.where(out @ np.asarray(q1, dtype=np.float64) < 0.0, -1.0, 1.0)
    return out * signs[:, None]


def look_along(directions: np.ndarray, rolls: np.ndarray) -> np.ndarray:
    """
    Orientations whose optical axis (+z of the camera frame) points along each
    direction, rotated by the given roll about that axis.

    Args:
        directions: (N, 3) unit vectors in world frame
        rolls: (N,) roll angles in radians

    Returns:
        (N, 4) scalar-first quaternions
    """
    directions = np.asarray(directions, dtype=np.float64)
    axes = np.cross(np.broadcast_to(_EZ, directions.shape), directions)
    sin_a = np.linalg.norm(axes, axis=1)
    cos_a = directions @ _EZ
    angles = np.arctan2(sin_a, cos_a)
    safe = sin_a > 1e-12
    unit_axes = np.zeros_like(axes)
    unit_axes[safe] = axes[safe] / sin_a[safe, None]
    # anti-parallel case: any perpendicular axis works
    flipped = (~safe) & (cos_a < 0.0)
    unit_axes[flipped] = np.array([1.0, 0.0, 0.0])
    align = Rotation.from_rotvec(unit_axes * angles[:, None])
    roll = Rotation.from_rotvec(np.outer(np.asarray(rolls, dtype=np.float64), _EZ))
    return from_scipy((align * roll).as_quat())


def aim_at(positions: np.ndarray, targets: np.ndarray, rolls: np.ndarray,
           mount_offset: Sequence[float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """
    Body orientations whose optical axis, starting at the offset optical centre,
    passes through each target.

    With body rotation R the optical centre is p + R o and the axis is R e_z.
    The target sits at body coordinates o + lambda e_z, so its body-frame unit
    direction w is fixed by |t - p|; R is the rotation taking w onto the world
    direction from p to t, with the given roll about that direction.

    Args:
        positions: (N, 3) body positions
        targets: (N, 3) world points to look at
        rolls: (N,) roll angles in radians
        mount_offset: Body-to-optical-centre offset in the body frame

    Returns:
        (N, 4) scalar-first quaternions; rows are NaN where the target lies
        within the mount offset of the body and cannot be aimed at
    """
    positions = np.atleast_2d(np.asarray(positions, dtype=np.float64))
    targets = np.atleast_2d(np.asarray(targets, dtype=np.float64))
    ox, oy, oz = (float(v) for v in mount_offset)
    delta = targets - positions
    dist = np.linalg.norm(delta, axis=1)
    along = dist ** 2 - ox ** 2 - oy ** 2
    # the target must lie ahead of the optical centre
    ok = (dist > 1e-12) & (along > 0.0)
    ok[ok] &= np.sqrt(along[ok]) > oz
    out = np.full((len(positions), 4), np.nan)
    if not ok.any():
        return out
    world = delta[ok] / dist[ok, None]
    body = np.column_stack([np.full(ok.sum(), ox), np.full(ok.sum(), oy), np.sqrt(along[ok])]) / dist[ok, None]
    rolls = np.broadcast_to(np.asarray(rolls, dtype=np.float64), (len(positions),))[ok]
    outer = Rotation.from_quat(to_scipy(look_along(world, rolls)))
    inner = Rotation.from_quat(to_scipy(look_along(body, np.zeros(len(body)))))
    out[ok] = from_scipy((outer * inner.inv()).as_quat())
    return out


def small_angle_perturbation(q, rotvec) -> np.ndarray:
    """Apply a rotation vector (radians) to an orientation, returning a unit quaternion"""
    delta = from_scipy(Rotation.from_rotvec(np.asarray(rotvec, dtype=np.float64)).as_quat())
    out = quaternion_multiply(np.asarray(q, dtype=np.float64), delta)
    return out / np.linalg.norm(out)


@dataclass(frozen=True)
class AABB:
    """Axis-aligned box in world coordinates (meters)"""
    lo: Vec3
    hi: Vec3

    def __post_init__(self):
        if any(h < l for l, h in zip(self.lo, self.hi)):
            raise ValueError(f"AABB upper corner below lower corner: {self.lo} > {self.hi}")

    @property
    def lo_array(self) -> np.ndarray:
        return np.asarray(self.lo, dtype=np.float64)

    @property
    def hi_array(self) -> np.ndarray:
        return np.asarray(self.hi, dtype=np.float64)

    @property
    def volume(self) -> float:
        return float(np.prod(self.hi_array - self.lo_array))

    @classmethod
    def from_points(cls, points: np.ndarray) -> 'AABB':
        """Tight bound of a non-empty point set"""
        pts = np.asarray(points, dtype=np.float64)
        return cls(tuple(pts.min(axis=0)), tuple(pts.max(axis=0)))

    def inflated(self, margin: float) -> 'AABB':
        return AABB(tuple(self.lo_array - margin), tuple(self.hi_array + margin))

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Inclusive containment test for (N, 3) points"""
        pts = np.atleast_2d(points)
        return np.all((pts >= self.lo_array) & (pts <= self.hi_array), axis=1)

    def distance(self, points: np.ndarray) -> np.ndarray:
        """Euclidean distance from each point to the box (0 inside)"""
        pts = np.atleast_2d(points)
        gap = np.maximum(np.maximum(self.lo_array - pts, pts - self.hi_array), 0.0)
        return np.linalg.norm(gap, axis=1)

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi)}

    @classmethod
    def from_dict(cls, data: dict) -> 'AABB':
        return cls(tuple(float(v) for v in data["lo"]), tuple(float(v) for v in data["hi"]))
