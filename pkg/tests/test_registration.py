"""Segmentation, instance merging, completion and chamfer evaluation"""

import numpy as np
import pytest

from ansense.core.config import RegistrationConfig
from ansense.core.geometry import look_along
from ansense.exceptions import RegistrationError
from ansense.models.camera import Viewpoint
from ansense.models.grid import BeliefGrid, VoxelState
from ansense.models.registration import BeliefState, InstanceStore, PartialCloud
from ansense.registration.completion import (
    chamfer, complete_instance, denormalize, evaluate_completion, normalize_partial
)
from ansense.registration.merging import merge_instances, merge_with_assignments, min_pair_distance
from ansense.registration.pipeline import integrate_belief
from ansense.registration.segmentation import segment_oracle
from ansense.sensor.camera import render_depth


def cloud(center, n=20, spread=0.005, seed=0, hint=None):
    rng = np.random.default_rng(seed)
    return PartialCloud(np.asarray(center) + rng.uniform(-spread, spread, size=(n, 3)), hint)


def oblique_viewpoint():
    """Above and beside the box so its front, top and side faces are all visible"""
    position = np.array([-0.2, 0.02, 0.18])
    direction = np.array([0.1, 0.1, 0.05]) - position
    direction /= np.linalg.norm(direction)
    return Viewpoint(tuple(position), tuple(look_along(direction[None], np.zeros(1))[0]))


class TestMinPairDistance:

    def test_brute_force_matches_tree(self):
        rng = np.random.default_rng(3)
        a, b = rng.normal(size=(300, 3)), rng.normal(size=(200, 3)) + 2.0
        assert min_pair_distance(a, b) == pytest.approx(min_pair_distance(a, b, accelerated=True), abs=1e-12)

    def test_known_distance(self):
        a = np.array([[0.0, 0.0, 0.0]])
        b = np.array([[3.0, 4.0, 0.0], [10.0, 0.0, 0.0]])
        assert min_pair_distance(a, b) == pytest.approx(5.0)


class TestMergeInstances:

    def test_first_cloud_creates_instance_zero(self):
        store = merge_instances(InstanceStore(), [cloud((0, 0, 0), hint=2)], eta=0.05)
        assert store.ids == [0]
        assert store.get(0).hints == frozenset({2})

    def test_close_clouds_merge(self):
        store = merge_instances(InstanceStore(), [cloud((0, 0, 0))], eta=0.05)
        store = merge_instances(store, [cloud((0.02, 0, 0), seed=1)], eta=0.05)
        assert len(store) == 1
        assert store.get(0).point_count == 40

    def test_far_clouds_stay_separate(self):
        store = merge_instances(InstanceStore(), [cloud((0, 0, 0)), cloud((0.2, 0, 0), seed=1)], eta=0.05)
        assert store.ids == [0, 1]

    def test_threshold_is_strict(self):
        a = PartialCloud(np.array([[0.0, 0.0, 0.0]]))
        b = PartialCloud(np.array([[0.5, 0.0, 0.0]]))
        assert len(merge_instances(InstanceStore(), [a, b], eta=0.5)) == 2
        assert len(merge_instances(InstanceStore(), [a, b], eta=0.501)) == 1

    def test_nearest_instance_wins(self):
        store = merge_instances(InstanceStore(), [cloud((0, 0, 0)), cloud((0.1, 0, 0), seed=1)], eta=0.05)
        store, assigned = merge_with_assignments(store, [cloud((0.07, 0, 0), seed=2)], eta=0.05)
        assert assigned == [1]
        assert len(store) == 2

    def test_later_clouds_see_earlier_ones(self):
        clouds = [cloud((0, 0, 0)), cloud((0.03, 0, 0), seed=1), cloud((0.06, 0, 0), seed=2)]
        store, assigned = merge_with_assignments(InstanceStore(), clouds, eta=0.05)
        assert assigned == [0, 0, 0]

    def test_well_separated_result_is_order_insensitive(self):
        clouds = [cloud((0, 0, 0)), cloud((0.3, 0, 0), seed=1), cloud((0.01, 0, 0), seed=2),
                  cloud((0.31, 0, 0), seed=3)]
        forward = merge_instances(InstanceStore(), clouds, eta=0.05)
        backward = merge_instances(InstanceStore(), clouds[::-1], eta=0.05)
        as_sets = lambda store: sorted(tuple(sorted(map(tuple, inst.points.round(9)))) for inst in store)
        assert as_sets(forward) == as_sets(backward)

    def test_eta_must_be_positive(self):
        with pytest.raises(ValueError):
            merge_instances(InstanceStore(), [cloud((0, 0, 0))], eta=0.0)


class TestNormalization:

    def test_round_trip(self):
        source = cloud((0.3, -0.1, 0.2), n=50, spread=0.05)
        normalized = normalize_partial(source, volume_cap=0.016)
        np.testing.assert_allclose(normalized.points.mean(axis=0), 0.0, atol=1e-12)
        assert np.linalg.norm(normalized.points, axis=1).max() <= 1.0
        np.testing.assert_allclose(denormalize(normalized), source.points, atol=1e-12)

    def test_cloud_outside_unit_ball_raises(self):
        with pytest.raises(RegistrationError):
            normalize_partial(cloud((0, 0, 0), spread=1.0), volume_cap=0.001)


class TestChamfer:

    def test_singletons(self):
        assert chamfer(np.array([[0.0, 0.0, 0.0]]), np.array([[1.0, 0.0, 0.0]])) == pytest.approx(2.0)

    def test_identical_sets(self):
        points = np.random.default_rng(0).normal(size=(40, 3))
        assert chamfer(points, points) == 0.0

    def test_symmetric(self):
        rng = np.random.default_rng(1)
        a, b = rng.normal(size=(30, 3)), rng.normal(size=(50, 3))
        assert chamfer(a, b) == chamfer(b, a)

    def test_empty_set_raises(self):
        with pytest.raises(RegistrationError):
            chamfer(np.zeros((0, 3)), np.zeros((1, 3)))


class TestCompletion:

    def test_fills_only_unknown_inside_the_box(self, tiny_dims):
        state = np.zeros(tiny_dims.shape, dtype=np.uint8)
        state[2, 2, 2] = VoxelState.FREE
        grid = BeliefGrid.unknown(tiny_dims).with_arrays(state=state)
        points = tiny_dims.voxel_centers(np.array([[1, 1, 1], [3, 3, 3]]))
        voxels = complete_instance(points, grid)
        assert len(voxels) == 27 - 1
        assert [2, 2, 2] not in voxels.tolist()
        assert np.all((voxels >= 1) & (voxels <= 3))

    def test_integration_never_overwrites_free(self, box_scene, small_sensor):
        intr = small_sensor.intrinsics
        obs = render_depth(box_scene, oblique_viewpoint(), intr)
        plain = integrate_belief(BeliefState(BeliefGrid.unknown(box_scene.dims)), obs,
                                 RegistrationConfig(completion_on=False), intr)
        completed = integrate_belief(BeliefState(BeliefGrid.unknown(box_scene.dims)), obs,
                                     RegistrationConfig(completion_on=True), intr)
        completed.grid.validate()
        np.testing.assert_array_equal(completed.grid.free_mask, plain.grid.free_mask)
        np.testing.assert_array_equal(completed.grid.seen_mask, plain.grid.seen_mask)
        assert completed.grid.predicted_mask.any()
        assert completed.grid.observed_count > plain.grid.observed_count

    def test_completion_is_scored_per_instance(self, box_scene, small_sensor):
        intr = small_sensor.intrinsics
        obs = render_depth(box_scene, oblique_viewpoint(), intr)
        belief = BeliefState(BeliefGrid.unknown(box_scene.dims))
        plain = integrate_belief(belief, obs, RegistrationConfig(completion_on=False), intr)
        completed = integrate_belief(belief, obs, RegistrationConfig(completion_on=True), intr)
        before = evaluate_completion(plain.store, plain.grid, box_scene)
        after = evaluate_completion(completed.store, completed.grid, box_scene)
        assert set(before) == set(after) == {0}
        assert before[0] > 0.0 and after[0] > 0.0


class TestSegmentation:

    def test_one_cloud_per_visible_object(self, two_box_scene, box_geometry, small_sensor):
        intr = small_sensor.intrinsics
        obs = render_depth(two_box_scene, box_geometry.start_viewpoint(), intr)
        clouds = segment_oracle(obs, 0.0, seed=0, intr=intr)
        assert [c.instance_hint for c in clouds] == obs.visible_instances()
        for c in clouds:
            assert len(c) == int(np.count_nonzero(obs.instance == c.instance_hint))

    def test_miss_probability_is_seeded(self, two_box_scene, box_geometry, small_sensor):
        intr = small_sensor.intrinsics
        obs = render_depth(two_box_scene, box_geometry.start_viewpoint(), intr)
        a = [c.instance_hint for c in segment_oracle(obs, 0.5, seed=4, intr=intr)]
        b = [c.instance_hint for c in segment_oracle(obs, 0.5, seed=4, intr=intr)]
        assert a == b

    def test_invalid_miss_probability(self, box_scene, box_geometry, small_sensor):
        obs = render_depth(box_scene, box_geometry.start_viewpoint(), small_sensor.intrinsics)
        with pytest.raises(ValueError):
            segment_oracle(obs, 1.0, seed=0, intr=small_sensor.intrinsics)
