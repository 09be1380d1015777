"""Collision model, path planning, validation and noisy execution"""

import numpy as np
import pytest

from ansense.core.config import ExecutionNoiseConfig, MotionConfig
from ansense.exceptions import PathPlanningError
from ansense.models.camera import Viewpoint
from ansense.models.planning import Path
from ansense.models.registration import InstanceRecord, InstanceStore
from ansense.motion.collision import CollisionModel, build_collision_model
from ansense.motion.execution import execute_with_noise, within_tolerance
from ansense.motion.metrics import path_distances
from ansense.motion.planner import interpolation_step, plan_path, segment_points, validate_path
from ansense.scene.coverage import ground_truth_grid
from ansense.scene.geometry import scene_geometry


@pytest.fixture
def thin_motion():
    return MotionConfig(body_radius=0.01)


@pytest.fixture
def known_model(box_scene, thin_motion):
    """Fully observed cabinet with a thin body so the interior is reachable"""
    geometry = scene_geometry(box_scene, thin_motion)
    return build_collision_model(ground_truth_grid(box_scene), InstanceStore(), geometry, thin_motion)


class TestCollisionModel:

    def test_staging_is_free_and_unknown_is_not(self, box_context):
        model = box_context.model
        assert model.is_free(Viewpoint((-0.3, 0.1, 0.1)))
        assert not model.is_free(Viewpoint((0.1, 0.1, 0.15)))

    def test_reach_sphere_bounds_positions(self, box_scene):
        motion = MotionConfig(reach_radius=0.1)
        geometry = scene_geometry(box_scene, motion)
        model = build_collision_model(ground_truth_grid(box_scene), InstanceStore(), geometry, motion)
        assert model.is_free(Viewpoint((-0.3, 0.1, 0.1)))
        assert not model.is_free(Viewpoint((-0.5, 0.1, 0.1)))

    def test_walls_are_inflated_by_the_body(self, box_context):
        model = box_context.model
        # lateral wall slabs reach one voxel past the opening plane
        assert not model.is_free(Viewpoint((-0.03, 0.01, 0.1)))
        assert model.is_free(Viewpoint((-0.3, 0.01, 0.1)))

    def test_observed_free_interior_is_feasible(self, known_model):
        assert known_model.is_free(Viewpoint((0.05, 0.1, 0.15)))
        assert not known_model.is_free(Viewpoint((0.1, 0.1, 0.05)))

    def test_snapshot_round_trip(self, box_scene, known_model):
        grid = ground_truth_grid(box_scene)
        restored = CollisionModel.from_snapshot(known_model.to_snapshot(), grid)
        points = np.random.default_rng(0).uniform([-0.6, 0.0, 0.0], [0.2, 0.2, 0.2], size=(300, 3))
        np.testing.assert_array_equal(restored.free_positions(points), known_model.free_positions(points))
        assert restored.grid_stamp == grid.stamp


class TestPlanPath:

    def test_straight_path_in_staging(self, box_context, small_config):
        start, goal = Viewpoint((-0.3, 0.1, 0.1)), Viewpoint((-0.45, 0.12, 0.08))
        path = plan_path(start, goal, box_context.model, small_config.motion, np.random.default_rng(0))
        assert path.start == start and path.goal == goal
        step = interpolation_step(small_config.motion, box_context.model)
        gaps = np.linalg.norm(np.diff(path.positions(), axis=0), axis=1)
        assert np.all(gaps <= step + 1e-12)
        assert validate_path(path, box_context.model, step).ok

    def test_detour_around_the_object(self, known_model, thin_motion):
        start, goal = Viewpoint((-0.3, 0.1, 0.05)), Viewpoint((0.17, 0.1, 0.05))
        path = plan_path(start, goal, known_model, thin_motion, np.random.default_rng(1))
        check = validate_path(path, known_model, interpolation_step(thin_motion, known_model))
        assert check.ok and check.first_failure is None
        workspace = path_distances(path)[1]
        assert workspace > np.linalg.norm(goal.position_array - start.position_array)

    def test_infeasible_goal_raises(self, box_context, small_config):
        with pytest.raises(PathPlanningError):
            plan_path(Viewpoint((-0.3, 0.1, 0.1)), Viewpoint((0.1, 0.1, 0.15)), box_context.model,
                      small_config.motion, np.random.default_rng(0))

    def test_validator_flags_a_path_through_unknown_space(self, box_context):
        path = Path([Viewpoint((-0.3, 0.1, 0.1)), Viewpoint((-0.2, 0.1, 0.1)), Viewpoint((0.1, 0.1, 0.15))])
        check = validate_path(path, box_context.model, 0.0125)
        assert not check.ok
        assert check.first_failure == 1

    def test_start_inside_a_grown_object_box_is_released(self, unknown_belief, box_geometry, small_config):
        start, goal = Viewpoint((-0.3, 0.1, 0.1)), Viewpoint((-0.45, 0.12, 0.08))
        swallowing = InstanceRecord(0, np.array([[-0.32, 0.08, 0.08], [-0.28, 0.12, 0.12]]))
        elsewhere = InstanceRecord(1, np.array([[-0.2, 0.15, 0.15], [-0.19, 0.16, 0.16]]))
        store = InstanceStore((swallowing, elsewhere))
        model = build_collision_model(unknown_belief.grid, store, box_geometry, small_config.motion)
        with pytest.raises(PathPlanningError):
            plan_path(start, goal, model, small_config.motion, np.random.default_rng(0))

        released = model.release(start.position_array)
        assert set(released.object_boxes) == {1}
        assert model.release(goal.position_array) is model
        path = plan_path(start, goal, released, small_config.motion, np.random.default_rng(0))
        assert validate_path(path, released, interpolation_step(small_config.motion, released)).ok

    def test_segment_points_include_both_ends(self):
        a, b = np.zeros(3), np.array([0.1, 0.0, 0.0])
        points = segment_points(a, b, 0.03)
        np.testing.assert_array_equal(points[0], a)
        np.testing.assert_allclose(points[-1], b)
        assert len(points) == 5


class TestPathDistances:

    def test_straight_translation(self):
        path = Path([Viewpoint((0.0, 0.0, 0.0)), Viewpoint((0.3, 0.4, 0.0))])
        cspace, workspace = path_distances(path, rotation_weight=0.1)
        assert workspace == pytest.approx(0.5)
        assert cspace == pytest.approx(0.5)

    def test_rotation_adds_weighted_angle(self):
        half = np.sqrt(0.5)
        path = Path([Viewpoint((0.0, 0.0, 0.0)), Viewpoint((0.0, 0.0, 0.0), (half, 0.0, 0.0, half))])
        cspace, workspace = path_distances(path, rotation_weight=0.1)
        assert workspace == 0.0
        assert cspace == pytest.approx(0.1 * np.pi / 2)


class TestExecution:

    def test_zero_noise_returns_the_goal(self):
        path = Path([Viewpoint((0.0, 0.0, 0.0)), Viewpoint((0.1, 0.0, 0.0))])
        assert execute_with_noise(path, ExecutionNoiseConfig(), seed=1) is path.goal

    def test_noise_is_seeded(self):
        path = Path([Viewpoint((0.0, 0.0, 0.0)), Viewpoint((0.1, 0.0, 0.0))])
        noise = ExecutionNoiseConfig(sigma_pos=0.01, sigma_ang=0.01)
        a = execute_with_noise(path, noise, seed=2)
        b = execute_with_noise(path, noise, seed=2)
        assert a == b
        assert a != path.goal
        assert np.linalg.norm(a.orientation) == pytest.approx(1.0)

    def test_tolerance(self):
        motion = MotionConfig()
        target = Viewpoint((0.0, 0.0, 0.0))
        assert within_tolerance(target, target, motion)
        assert within_tolerance(Viewpoint((0.01, 0.0, 0.0)), target, motion)
        assert not within_tolerance(Viewpoint((0.05, 0.0, 0.0)), target, motion)
        tilted = Viewpoint((0.0, 0.0, 0.0), (np.cos(0.1), np.sin(0.1), 0.0, 0.0))
        assert not within_tolerance(tilted, target, motion)
