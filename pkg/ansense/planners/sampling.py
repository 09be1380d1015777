"""
Feasible viewpoint sampling

Two proposal distributions: uniform over the feasible region (staging region and
FREE interior voxels, by volume) with the optical axis aimed at a uniform point
of the grid box, and a 7D Gaussian whose quaternion part is renormalised. A
proposal is accepted when both the body and its optical centre are feasible.
"""

import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from ..core.geometry import aim_at, rotation_matrix
from ..exceptions import NoFeasibleViewpointError
from ..models.camera import Viewpoint
from ..models.planning import SampleBatch
from ..motion.context import MotionContext

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class UniformRegion:
    """Uniform proposals over the feasible region"""
    pass


@dataclass(frozen=True, eq=False)
class Gaussian:
    """Axis-aligned Gaussian over (x, y, z, qw, qx, qy, qz)"""
    mu: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        """Validate shapes"""
        mu = np.asarray(self.mu, dtype=np.float64)
        sigma = np.broadcast_to(np.asarray(self.sigma, dtype=np.float64), (7,)).copy()
        if mu.shape != (7,):
            raise ValueError(f"Gaussian mean must be a 7-vector, got shape {mu.shape}")
        if np.any(sigma < 0):
            raise ValueError("Gaussian sigma must be non-negative")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)


Distribution = Union[UniformRegion, Gaussian]


def _uniform_positions(ctx: MotionContext, rng: np.random.Generator, n: int) -> np.ndarray:
    model = ctx.model
    dims = model.dims
    staging = model.staging
    free_idx = np.argwhere(model.free)
    staging_volume = staging.volume
    free_volume = len(free_idx) * dims.resolution ** 3
    p_staging = staging_volume / (staging_volume + free_volume) if staging_volume + free_volume > 0 else 1.0

    in_staging = rng.random(n) < p_staging
    positions = rng.uniform(staging.lo_array, staging.hi_array, size=(n, 3))
    n_free = int((~in_staging).sum())
    if n_free and len(free_idx):
        picks = free_idx[rng.integers(len(free_idx), size=n_free)]
        offsets = rng.random((n_free, 3))
        positions[~in_staging] = dims.origin_array + (picks + offsets) * dims.resolution
    return positions


def _uniform_proposals(ctx: MotionContext, rng: np.random.Generator, n: int) -> np.ndarray:
    positions = _uniform_positions(ctx, rng, n)
    dims = ctx.model.dims
    targets = rng.uniform(dims.origin_array, dims.upper, size=(n, 3))
    rolls = rng.uniform(0.0, 2.0 * np.pi, size=n)
    return np.concatenate([positions, aim_at(positions, targets, rolls, ctx.mount_offset)], axis=1)


def _feasible(ctx: MotionContext, proposals: np.ndarray) -> np.ndarray:
    ok = ctx.model.free_positions(proposals[:, :3])
    offset = np.asarray(ctx.mount_offset, dtype=np.float64)
    if ok.any() and offset.any():
        centers = proposals[ok, :3] + rotation_matrix(proposals[ok, 3:]) @ offset
        ok[ok] = ctx.model.in_region(centers)
    return ok


def _gaussian_proposals(dist: Gaussian, rng: np.random.Generator, n: int) -> np.ndarray:
    vectors = dist.mu + dist.sigma * rng.standard_normal((n, 7))
    norms = np.linalg.norm(vectors[:, 3:], axis=1, keepdims=True)
    vectors[:, 3:] = vectors[:, 3:] / np.where(norms > 1e-12, norms, np.nan)
    return vectors


def sample_feasible(ctx: MotionContext, dist: Distribution, n: int,
                    rng: np.random.Generator) -> SampleBatch:
    """
    Draw up to ``n`` feasible viewpoints.

    Proposals are drawn in rounds and filtered by the collision model's
    feasibility predicate until ``n`` are accepted or ``n * attempt_factor``
    proposals have been drawn; accepted samples keep their draw order.

    Returns:
        SampleBatch (``exhausted`` when fewer than n were found)

    Raises:
        NoFeasibleViewpointError: If no proposal was feasible
    """
    if n < 1:
        raise ValueError("Sample count must be at least 1")
    budget = n * ctx.motion.attempt_factor
    accepted = []
    attempts = 0
    while len(accepted) < n and attempts < budget:
        size = min(budget - attempts, max(n - len(accepted), 16) * 2)
        if isinstance(dist, Gaussian):
            proposals = _gaussian_proposals(dist, rng, size)
        else:
            proposals = _uniform_proposals(ctx, rng, size)
        attempts += size
        valid = np.all(np.isfinite(proposals), axis=1)
        ok = np.zeros(size, dtype=bool)
        ok[valid] = _feasible(ctx, proposals[valid])
        for vec in proposals[ok][: n - len(accepted)]:
            accepted.append(Viewpoint.from_vector(vec))

    if not accepted:
        raise NoFeasibleViewpointError(f"No feasible viewpoint in {attempts} proposals")
    if len(accepted) < n:
        logger.debug(f"Sampling exhausted: {len(accepted)}/{n} feasible in {attempts} proposals")
    return SampleBatch(accepted, n, attempts)
