"""
Path planning for the free-flying camera body

A straight segment is tried first; otherwise a rapidly-exploring random tree is
grown over positions. Orientations are slerped along the path by arc length and
every returned path is checked by dense interpolation.
"""

import logging
import math
from typing import List, Optional

import numpy as np

from ..core.config import MotionConfig
from ..core.geometry import slerp
from ..exceptions import PathPlanningError
from ..models.camera import Viewpoint
from ..models.planning import Path, PathValidation
from .collision import CollisionModel

logger = logging.getLogger(__name__)


def interpolation_step(motion: MotionConfig, model: CollisionModel) -> float:
    """Dense-check step: configured value or half a voxel"""
    return motion.interpolation_step or model.dims.resolution / 2.0


def segment_points(a: np.ndarray, b: np.ndarray, step: float) -> np.ndarray:
    """Points from a to b (both included) no more than ``step`` apart"""
    count = max(1, int(math.ceil(float(np.linalg.norm(b - a)) / step)))
    fractions = np.linspace(0.0, 1.0, count + 1)
    return a + fractions[:, None] * (b - a)


def _segment_free(model: CollisionModel, a: np.ndarray, b: np.ndarray, step: float) -> bool:
    return bool(model.free_positions(segment_points(a, b, step)).all())


def _densify(positions: List[np.ndarray], step: float) -> np.ndarray:
    dense = [positions[0][None, :]]
    for a, b in zip(positions, positions[1:]):
        dense.append(segment_points(a, b, step)[1:])
    return np.concatenate(dense)


def _with_orientations(points: np.ndarray, start: Viewpoint, goal: Viewpoint) -> List[Viewpoint]:
    """Attach orientations slerped by cumulative arc length"""
    lengths = np.linalg.norm(np.diff(points, axis=0), axis=1)
    total = float(lengths.sum())
    if total > 0.0:
        fractions = np.concatenate([[0.0], np.cumsum(lengths)]) / total
    else:
        fractions = np.linspace(0.0, 1.0, len(points))
    quats = slerp(start.orientation_array, goal.orientation_array, fractions)
    quats[0], quats[-1] = start.orientation_array, goal.orientation_array
    waypoints = [Viewpoint(tuple(p), tuple(q / np.linalg.norm(q))) for p, q in zip(points, quats)]
    waypoints[0], waypoints[-1] = start, goal
    return waypoints


def _grow_tree(start: np.ndarray, goal: np.ndarray, model: CollisionModel, motion: MotionConfig,
               step: float, rng: np.random.Generator) -> Optional[List[np.ndarray]]:
    box = model.sampling_box()
    nodes = np.empty((motion.rrt_budget + 2, 3))
    parents = np.full(motion.rrt_budget + 2, -1, dtype=np.int64)
    nodes[0] = start
    size = 1
    for _ in range(motion.rrt_budget):
        if rng.random() < motion.goal_bias:
            target = goal
        else:
            target = rng.uniform(box.lo_array, box.hi_array)
        dists = np.linalg.norm(nodes[:size] - target, axis=1)
        nearest = int(np.argmin(dists))
        delta = target - nodes[nearest]
        length = float(dists[nearest])
        if length < 1e-12:
            continue
        new = nodes[nearest] + delta * min(1.0, motion.rrt_step / length)
        if not _segment_free(model, nodes[nearest], new, step):
            continue
        nodes[size] = new
        parents[size] = nearest
        size += 1
        if np.linalg.norm(goal - new) <= motion.rrt_step and _segment_free(model, new, goal, step):
            nodes[size] = goal
            parents[size] = size - 1
            chain = [size]
            while parents[chain[-1]] >= 0:
                chain.append(int(parents[chain[-1]]))
            return [nodes[i].copy() for i in reversed(chain)]
    return None


def plan_path(start: Viewpoint, goal: Viewpoint, model: CollisionModel, motion: MotionConfig,
              rng: np.random.Generator) -> Path:
    """
    Plan a collision-free path between two feasible poses.

    Args:
        start: Current pose
        goal: Target pose
        model: Collision model of the current belief
        motion: Budget, step and goal bias of the tree search
        rng: Tree sampling stream

    Returns:
        Path whose consecutive waypoints are at most one interpolation step apart

    Raises:
        PathPlanningError: If an endpoint is infeasible or the budget is exhausted
    """
    if not model.is_free(start):
        raise PathPlanningError(f"Path start {start.position} is not collision-free")
    if not model.is_free(goal):
        raise PathPlanningError(f"Path goal {goal.position} is not collision-free")
    step = interpolation_step(motion, model)
    a, b = start.position_array, goal.position_array

    if _segment_free(model, a, b, step):
        route = [a, b]
    else:
        route = _grow_tree(a, b, model, motion, step, rng)
        if route is None:
            raise PathPlanningError(f"No path found within {motion.rrt_budget} tree samples")
        logger.debug(f"Tree path with {len(route)} nodes")

    path = Path(_with_orientations(_densify(route, step), start, goal), model.grid_stamp)
    check = validate_path(path, model, step)
    if not check.ok:
        raise PathPlanningError(f"Planned path failed validation at segment {check.first_failure}")
    return path


def validate_path(path: Path, model: CollisionModel, step: float) -> PathValidation:
    """
    Independent dense-interpolation check: every segment is re-sampled at
    ``step`` and every sample must be feasible.
    """
    positions = path.positions()
    checked = 0
    for index, (a, b) in enumerate(zip(positions, positions[1:])):
        points = segment_points(a, b, step)
        checked += len(points)
        if not model.free_positions(points).all():
            return PathValidation(False, checked, index)
    return PathValidation(True, checked)
