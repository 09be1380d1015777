"""
Procedural scene generation with domain randomisation
"""

import logging
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import DomainRandomizationConfig
from ..core.utils import STREAM_SCENE, derive_rng
from ..exceptions import SceneGenerationError
from ..models.grid import GridDims
from ..models.scene import GroundTruthObject, ObjectShape, OpeningFace, SceneSpec

logger = logging.getLogger(__name__)

MIN_OBJECTS = 3


def shape_height(shape: ObjectShape, size: Sequence[float]) -> float:
    return size[0] if shape == ObjectShape.SPHERE else size[2]


def _shape_pattern(shape: ObjectShape, cx: float, cy: float, yaw: float,
                   size: Sequence[float], dims: GridDims) -> np.ndarray:
    """Voxels of an object whose bottom sits on layer 0; (N, 3) int array"""
    res = dims.resolution
    ox, oy, _ = dims.origin
    sx, sy, sz = size
    height = shape_height(shape, size)
    reach = 0.5 * (sx if shape in (ObjectShape.SPHERE, ObjectShape.CYLINDER) else float(np.hypot(sx, sy)))

    i_lo = int(np.floor((cx - reach - ox) / res)) - 1
    i_hi = int(np.floor((cx + reach - ox) / res)) + 1
    j_lo = int(np.floor((cy - reach - oy) / res)) - 1
    j_hi = int(np.floor((cy + reach - oy) / res)) + 1
    m_hi = int(np.ceil(height / res)) + 1
    ii, jj, mm = np.meshgrid(np.arange(i_lo, i_hi + 1), np.arange(j_lo, j_hi + 1),
                             np.arange(0, m_hi + 1), indexing="ij")
    dx = ox + (ii + 0.5) * res - cx
    dy = oy + (jj + 0.5) * res - cy
    z = (mm + 0.5) * res
    c, s = np.cos(yaw), np.sin(yaw)
    x_l = c * dx + s * dy
    y_l = -s * dx + c * dy

    if shape == ObjectShape.SPHERE:
        r = sx / 2.0
        inside = x_l**2 + y_l**2 + (z - r) ** 2 <= r**2
    else:
        vertical = (z >= 0.0) & (z <= sz)
        if shape == ObjectShape.CYLINDER:
            inside = vertical & (x_l**2 + y_l**2 <= (sx / 2.0) ** 2)
        else:
            inside = vertical & (np.abs(x_l) <= sx / 2.0) & (np.abs(y_l) <= sy / 2.0)
            if shape == ObjectShape.L_PRISM:
                inside &= ~((x_l > 0.0) & (y_l > 0.0))

    voxels = np.stack([ii[inside], jj[inside], mm[inside]], axis=1).astype(np.int64)
    if len(voxels) == 0:
        # thinner than a voxel: keep the voxel under the object's centre
        voxels = np.array([[int(np.floor((cx - ox) / res)), int(np.floor((cy - oy) / res)), 0]],
                          dtype=np.int64)
    return voxels


def voxelize_object(shape: ObjectShape, position: Sequence[float], yaw: float,
                    size: Sequence[float], dims: GridDims) -> np.ndarray:
    """
    Voxelisation rule: a voxel belongs to the object iff its centre lies inside
    the primitive. The object's bottom is snapped to a voxel layer.

    Args:
        shape: Primitive type
        position: (x, y, bottom z) in world meters
        yaw: Rotation about +z in radians
        size: (sx, sy, sz) in meters; spheres use sx as diameter, cylinders sx as diameter
        dims: Grid the voxels index into

    Returns:
        (N, 3) voxel indices (not clipped to the grid)
    """
    cx, cy, bottom = position
    layer = int(round((bottom - dims.origin[2]) / dims.resolution))
    pattern = _shape_pattern(ObjectShape(shape), cx, cy, yaw, size, dims)
    return pattern + np.array([0, 0, layer])


def _interior(voxels: np.ndarray, dims: GridDims) -> bool:
    hi = np.asarray(dims.shape) - 2
    return bool(np.all(voxels >= 1) and np.all(voxels <= hi))


def _settle(pattern: np.ndarray, occupancy: np.ndarray) -> Optional[int]:
    """Drop a layer-0 pattern from the top; return its resting layer or None"""
    nz = occupancy.shape[2]
    top_layer = nz - 2 - int(pattern[:, 2].max())
    if top_layer < 1:
        return None

    def overlaps(layer: int) -> bool:
        return bool(occupancy[pattern[:, 0], pattern[:, 1], pattern[:, 2] + layer].any())

    if overlaps(top_layer):
        return None
    layer = top_layer
    while layer > 1 and not overlaps(layer - 1):
        layer -= 1
    return layer


def scene_dims(extents: Sequence[float], resolution: float, cabinet_offset: float,
               cabinet_height: float) -> GridDims:
    """Grid covering the cabinet interior, centred laterally on the robot frame"""
    counts = [max(3, int(round(e / resolution))) for e in extents]
    ny_extent = counts[1] * resolution
    return GridDims(counts[0], counts[1], counts[2], resolution,
                    (cabinet_offset, -ny_extent / 2.0, cabinet_height))


def generate_scene(config: DomainRandomizationConfig, seed: int) -> SceneSpec:
    """
    Draw a random cabinet scene.

    Extents, cabinet height, base offset and objects are drawn from the config
    ranges; objects are dropped vertically until they rest on the floor or on
    another object. Pure function of (config, seed).

    Args:
        config: Domain randomisation ranges
        seed: Scene seed

    Returns:
        SceneSpec

    Raises:
        SceneGenerationError: If fewer than the minimum object count could be placed
    """
    rng = derive_rng(seed, STREAM_SCENE)
    extents = tuple(float(rng.uniform(*r)) for r in (config.extent_x, config.extent_y, config.extent_z))
    height = float(rng.uniform(*config.cabinet_height))
    base_offset = (float(rng.uniform(*config.base_offset_x)), float(rng.uniform(*config.base_offset_y)))
    face = OpeningFace(config.opening_faces[int(rng.integers(len(config.opening_faces)))])
    dims = scene_dims(extents, config.resolution, config.cabinet_offset, height)

    target = int(rng.integers(config.object_count[0], config.object_count[1] + 1))
    required = min(MIN_OBJECTS, config.object_count[0])
    occupancy = np.zeros(dims.shape, dtype=np.bool_)
    objects: List[GroundTruthObject] = []
    lo = dims.origin_array
    hi = dims.upper

    for object_id in range(target):
        placed = None
        for _ in range(config.placement_retries):
            shape = ObjectShape(config.shapes[int(rng.integers(len(config.shapes)))])
            size = tuple(float(v) for v in rng.uniform(*config.object_size, size=3))
            yaw = float(rng.uniform(0.0, 2.0 * np.pi))
            cx = float(rng.uniform(lo[0], hi[0]))
            cy = float(rng.uniform(lo[1], hi[1]))
            pattern = _shape_pattern(shape, cx, cy, yaw, size, dims)
            if not _interior(pattern + np.array([0, 0, 1]), dims):
                continue
            layer = _settle(pattern, occupancy)
            if layer is None:
                continue
            voxels = pattern + np.array([0, 0, layer])
            bottom = float(dims.origin[2] + layer * dims.resolution)
            placed = GroundTruthObject(object_id, shape, (cx, cy, bottom), yaw, size, voxels)
            break
        if placed is None:
            logger.warning(f"Scene {seed}: placement retries exhausted after {len(objects)} objects")
            break
        occupancy[placed.voxels[:, 0], placed.voxels[:, 1], placed.voxels[:, 2]] = True
        objects.append(placed)

    if len(objects) < required:
        raise SceneGenerationError(
            f"Scene {seed}: placed {len(objects)} objects, need at least {required}")

    logger.debug(f"Generated scene {seed}: dims {dims.shape}, {len(objects)} objects, face {face.value}")
    return SceneSpec(dims=dims, opening_face=face, cabinet_height=height, objects=objects,
                     seed=seed, extents=extents, base_offset=base_offset)


def scene_from_boxes(dims: GridDims, boxes: Iterable[Tuple[Sequence[int], Sequence[int]]],
                     opening_face: str = "-x", seed: int = 0,
                     base_offset: Tuple[float, float] = (-0.3, 0.0)) -> SceneSpec:
    """
    Build a scene of axis-aligned box objects given inclusive voxel index ranges.

    Args:
        dims: Grid dims
        boxes: ((i0, j0, k0), (i1, j1, k1)) inclusive index corners per object
        opening_face: Open face identifier
        seed: Recorded seed
        base_offset: Camera base offset relative to the opening

    Returns:
        SceneSpec whose objects reproduce under voxelize_object
    """
    res = dims.resolution
    origin = dims.origin_array
    objects = []
    for object_id, (lo_idx, hi_idx) in enumerate(boxes):
        lo_idx = np.asarray(lo_idx, dtype=np.int64)
        hi_idx = np.asarray(hi_idx, dtype=np.int64)
        counts = hi_idx - lo_idx + 1
        if np.any(counts < 1):
            raise SceneGenerationError(f"Box {object_id} has an empty index range")
        size = tuple(float(c * res) for c in counts)
        center = origin + (lo_idx + hi_idx + 1) * res / 2.0
        position = (float(center[0]), float(center[1]), float(origin[2] + lo_idx[2] * res))
        voxels = np.indices(counts).reshape(3, -1).T + lo_idx
        objects.append(GroundTruthObject(object_id, ObjectShape.BOX, position, 0.0, size, voxels))
    return SceneSpec(dims=dims, opening_face=OpeningFace(opening_face), cabinet_height=dims.origin[2],
                     objects=objects, seed=seed, extents=dims.extent, base_offset=base_offset)
