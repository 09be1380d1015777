"""
Fixed-size features of beliefs and viewpoints shared by both learned models
"""

from typing import Sequence, Tuple

import numpy as np

from ..core.geometry import canonical_quaternion
from ..models.camera import Viewpoint
from ..models.grid import BeliefGrid, GridDims, VoxelState

VIEW_FEATURES = 7


def _bin_index(n: int, k: int) -> np.ndarray:
    return (np.arange(n) * k) // n


def featurize(grid: BeliefGrid, coarse_shape: Tuple[int, int, int] = (5, 8, 4)) -> np.ndarray:
    """
    Pool the belief into a coarse 3-channel tensor of UNKNOWN/FREE/OCCUPIED
    fractions per block, flattened channel-major.

    Voxel i along an axis of n voxels falls into block floor(i * k / n), so the
    output size is fixed by ``coarse_shape`` for any grid; empty blocks read 0.
    """
    kx, ky, kz = coarse_shape
    nx, ny, nz = grid.dims.shape
    blocks = ((_bin_index(nx, kx)[:, None, None] * ky + _bin_index(ny, ky)[None, :, None]) * kz
              + _bin_index(nz, kz)[None, None, :])
    flat_blocks = blocks.ravel()
    total = kx * ky * kz
    sizes = np.bincount(flat_blocks, minlength=total).astype(np.float64)
    state = grid.state.ravel()
    channels = []
    for code in (VoxelState.UNKNOWN, VoxelState.FREE, VoxelState.OCCUPIED):
        counts = np.bincount(flat_blocks[state == code], minlength=total).astype(np.float64)
        channels.append(np.divide(counts, sizes, out=np.zeros(total), where=sizes > 0))
    return np.concatenate(channels)


def viewpoint_features(viewpoint: Viewpoint, dims: GridDims) -> np.ndarray:
    """Position in grid-extent units relative to the grid origin plus the w >= 0 quaternion"""
    position = (viewpoint.position_array - dims.origin_array) / np.asarray(dims.extent)
    return np.concatenate([position, canonical_quaternion(viewpoint.orientation_array)])


def viewpoint_feature_batch(viewpoints: Sequence[Viewpoint], dims: GridDims) -> np.ndarray:
    if not viewpoints:
        return np.zeros((0, VIEW_FEATURES))
    return np.stack([viewpoint_features(v, dims) for v in viewpoints])
