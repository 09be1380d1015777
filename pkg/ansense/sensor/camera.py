"""
Simulated pinhole depth camera: rendering, visibility carving and depth noise
"""

import logging
from functools import lru_cache
from typing import Dict, Optional, Sequence

import numpy as np

from ..core.config import SensorConfig
from ..core.geometry import rotation_matrix
from ..core.utils import STREAM_SENSOR_NOISE, derive_rng
from ..exceptions import GridMismatchError, SensorError
from ..models.camera import CameraIntrinsics, Observation, Viewpoint
from ..models.grid import BeliefGrid
from ..models.scene import SceneSpec
from .kernels import carve_kernel, mark_hits_kernel, render_kernel, traversed_kernel

logger = logging.getLogger(__name__)

# Back-projected hits are pushed this far (m) past the surface into the hit voxel.
HIT_BIAS = 1e-6
# Depth discontinuity (m) that marks a pixel as an edge for dropout.
EDGE_THRESHOLD = 0.05
_SKIP = -2


@lru_cache(maxsize=16)
def _camera_rays(intr: CameraIntrinsics) -> np.ndarray:
    rays = intr.camera_rays()
    rays.setflags(write=False)
    return rays


def world_rays(intr: CameraIntrinsics, orientation: Sequence[float]) -> np.ndarray:
    """(H, W, 3) unit pixel-ray directions in the world frame"""
    rotation = rotation_matrix(orientation)
    return np.ascontiguousarray(_camera_rays(intr) @ rotation.T)


def optical_center(viewpoint: Viewpoint, mount_offset: Sequence[float] = (0.0, 0.0, 0.0)) -> np.ndarray:
    """Camera centre of a body pose, offset rigidly in the body frame"""
    offset = np.asarray(mount_offset, dtype=np.float64)
    if not offset.any():
        return viewpoint.position_array
    return viewpoint.position_array + rotation_matrix(viewpoint.orientation) @ offset


def render_depth(spec: SceneSpec, viewpoint: Viewpoint, intr: CameraIntrinsics,
                 mount_offset: Sequence[float] = (0.0, 0.0, 0.0)) -> Observation:
    """
    Render depth and instance images of the ground truth by 3D DDA ray marching.

    Depth is the Euclidean range along each pixel ray to the first object voxel
    face or closed wall; rays leaving through the opening or exceeding maxRange
    record ``inf``. Instance ids are set only for object hits.

    Args:
        spec: Ground-truth scene
        viewpoint: Camera body pose
        intr: Intrinsics
        mount_offset: Body-to-optical-centre offset in the body frame

    Returns:
        Observation

    Raises:
        SensorError: If the optical centre lies inside an occupied voxel
    """
    dims = spec.dims
    center = optical_center(viewpoint, mount_offset)
    index = dims.world_to_index(center)[0]
    if dims.in_bounds(index)[0] and spec.labels[tuple(index)] >= 0:
        raise SensorError(f"Camera at {tuple(center)} is inside object {spec.labels[tuple(index)]}")

    directions = world_rays(intr, viewpoint.orientation)
    p_vox = (center - dims.origin_array) / dims.resolution
    depth_vox, instance = render_kernel(spec.labels, p_vox, directions, spec.closed_faces,
                                        intr.max_range / dims.resolution)
    depth = depth_vox * dims.resolution
    return Observation(viewpoint, depth, instance, tuple(center))


def _hit_ids(obs: Observation, instance_map: Optional[Dict[int, int]]) -> np.ndarray:
    """Per-pixel id to write for object hits, _SKIP elsewhere"""
    ids = np.full(obs.instance.shape, _SKIP, dtype=np.int32)
    hits = (obs.instance >= 0) & np.isfinite(obs.depth)
    if instance_map is None:
        ids[hits] = obs.instance[hits]
    else:
        for gt_id in np.unique(obs.instance[hits]):
            ids[hits & (obs.instance == gt_id)] = instance_map.get(int(gt_id), -1)
    return ids


def carve_visibility(grid: BeliefGrid, obs: Observation, intr: CameraIntrinsics,
                     instance_map: Optional[Dict[int, int]] = None) -> BeliefGrid:
    """
    Update a belief with one observation.

    Voxels whose centre projects inside the image and lies strictly nearer than
    the pixel's measured range (maxRange for no-hit pixels) become FREE, provided
    some pixel ray also passes through them before its own range. A voxel beside
    a ray that hits something farther away is therefore never freed. The
    voxel containing each object hit then becomes OCCUPIED/SEEN with the hit's
    id (remapped through ``instance_map`` when given). Voxels behind hits are
    left unchanged.

    Args:
        grid: Current belief
        obs: Observation rendered with ``intr``
        intr: Intrinsics
        instance_map: Optional ground-truth id -> store id mapping (-1 if absent)

    Returns:
        New BeliefGrid

    Raises:
        GridMismatchError: If the observation does not match the intrinsics
    """
    if obs.depth.shape != (intr.height, intr.width):
        raise GridMismatchError(
            f"Observation shape {obs.depth.shape} does not match intrinsics {(intr.height, intr.width)}")
    dims = grid.dims
    state, origin_flag, instance = grid.mutable_copy()
    rotation = np.ascontiguousarray(rotation_matrix(obs.viewpoint.orientation))
    center = np.asarray(obs.optical_center, dtype=np.float64)
    depth = np.ascontiguousarray(obs.depth, dtype=np.float64)

    directions = world_rays(intr, obs.viewpoint.orientation)
    p_vox = (center - dims.origin_array) / dims.resolution
    crossed = traversed_kernel(dims.shape, p_vox, directions, depth / dims.resolution,
                               intr.max_range / dims.resolution)
    carve_kernel(state, origin_flag, instance, crossed, dims.origin_array, dims.resolution, center, rotation,
                 intr.fx, intr.fy, intr.cx, intr.cy, depth, intr.max_range)
    mark_hits_kernel(state, origin_flag, instance, dims.origin_array, dims.resolution, center,
                     directions, depth,
                     _hit_ids(obs, instance_map), HIT_BIAS)
    return grid.with_arrays(state, origin_flag, instance)


def back_project(obs: Observation, intr: CameraIntrinsics, mask: np.ndarray) -> np.ndarray:
    """World points of the masked pixels, nudged into the hit voxel"""
    directions = world_rays(intr, obs.viewpoint.orientation)
    center = np.asarray(obs.optical_center, dtype=np.float64)
    return center + directions[mask] * (obs.depth[mask] + HIT_BIAS)[:, None]


def _edge_mask(depth: np.ndarray) -> np.ndarray:
    finite = np.isfinite(depth)
    filled = np.where(finite, depth, np.inf)
    padded = np.pad(filled, 1, mode="edge")
    edge = np.zeros(depth.shape, dtype=bool)
    center = padded[1:-1, 1:-1]
    for dr, dc in ((0, 1), (2, 1), (1, 0), (1, 2)):
        neighbour = padded[dr:dr + depth.shape[0], dc:dc + depth.shape[1]]
        with np.errstate(invalid="ignore"):
            diff = np.abs(neighbour - center)
        edge |= ~np.isfinite(neighbour) | (diff > EDGE_THRESHOLD)
    return edge & finite


def apply_depth_noise(obs: Observation, config: SensorConfig, seed: int) -> Observation:
    """
    Perturb an observation: Gaussian range noise on hit pixels and random dropout
    of depth-edge pixels. Returns the observation unchanged when noise is off.
    """
    if not config.noise_enabled:
        return obs
    rng = derive_rng(seed, STREAM_SENSOR_NOISE)
    depth = obs.depth.copy()
    instance = obs.instance.copy()
    finite = np.isfinite(depth)

    if config.edge_dropout > 0:
        drop = _edge_mask(depth) & (rng.random(depth.shape) < config.edge_dropout)
        depth[drop] = np.inf
        instance[drop] = -1
        finite &= ~drop
    if config.depth_noise > 0:
        noise = rng.normal(0.0, config.depth_noise, size=depth.shape)
        depth[finite] = np.clip(depth[finite] + noise[finite], 1e-6, config.max_range)

    logger.debug(f"Applied depth noise: {int((~np.isfinite(depth)).sum() - (~obs.hit_mask).sum())} pixels dropped")
    return Observation(obs.viewpoint, depth, instance, obs.optical_center, dict(obs.metadata))
