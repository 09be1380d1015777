"""Score models: heuristic gain, rollout labels, the learned surrogate and its data"""

import numpy as np
import pytest
import torch

from ansense.core.config import AnsenseConfig, RegistrationConfig, ScoreConfig, TrainingConfig
from ansense.core.geometry import look_along
from ansense.exceptions import InfeasibleViewpointError, ModelShapeError, ScoreModelError, TrainingError
from ansense.models.camera import Viewpoint
from ansense.models.grid import BeliefGrid, GridDims
from ansense.models.learning import TrainingPair
from ansense.registration.pipeline import integrate_belief
from ansense.scene.coverage import coverage, ground_truth_grid
from ansense.score.base import ConstantScore
from ansense.score.dataset import generate_training_data
from ansense.score.factory import create_score_model, get_available_score_models
from ansense.score.features import featurize, viewpoint_features
from ansense.score.gradcheck import gradient_check
from ansense.score.heuristic import HeuristicScore
from ansense.score.rollout import RolloutLabeler, label_rollout
from ansense.score.surrogate import (
    SurrogateNet, SurrogateScore, load_parameters, net_parameters, train_surrogate
)
from ansense.sensor.camera import render_depth

SMALL_SCORE = ScoreConfig(coarse_shape=(2, 2, 2), grid_hidden=(16, 8), view_hidden=8)


def synthetic_pairs(n, seed=0):
    """Labels depend smoothly on the viewpoint so a few epochs make progress"""
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        grid = rng.random(SMALL_SCORE.feature_size)
        view = np.concatenate([rng.random(3), [1.0, 0.0, 0.0, 0.0]])
        pairs.append(TrainingPair(grid, view, float(0.2 + 0.6 * view[0])))
    return pairs


class TestHeuristicScore:

    def test_scores_and_counters(self, unknown_belief, box_geometry, box_scene, small_sensor):
        model = HeuristicScore(small_sensor, box_scene.closed_faces)
        start = box_geometry.start_viewpoint()
        views = [start, Viewpoint((-0.4, 0.1, 0.1), start.orientation)]
        scores = model.predict(unknown_belief, views)
        assert scores.shape == (2,)
        assert np.all((scores > 0.0) & (scores <= 1.0))
        assert model.call_count == 1 and model.evaluated_count == 2
        model.reset_counters()
        assert model.call_count == 0

    def test_known_grid_scores_one(self, box_scene, box_geometry, small_sensor):
        model = HeuristicScore(small_sensor, box_scene.closed_faces)
        assert model.predict_one(ground_truth_grid(box_scene), box_geometry.start_viewpoint()) == 1.0

    def test_looking_away_gains_nothing(self, unknown_belief, small_sensor):
        quat = look_along(np.array([[-1.0, 0.0, 0.0]]), np.zeros(1))[0]
        model = HeuristicScore(small_sensor)
        assert model.predict_one(unknown_belief, Viewpoint((-0.3, 0.1, 0.1), tuple(quat))) == 0.0


class TestRolloutLabeler:

    def test_needs_a_scene(self, unknown_belief, box_geometry, small_sensor):
        model = RolloutLabeler(small_sensor, RegistrationConfig())
        with pytest.raises(ScoreModelError):
            model.predict(unknown_belief, [box_geometry.start_viewpoint()])

    def test_matches_a_real_integration(self, box_scene, box_geometry, unknown_belief, small_sensor):
        registration = RegistrationConfig()
        model = RolloutLabeler(small_sensor, registration).attach(box_scene)
        start = box_geometry.start_viewpoint()
        obs = render_depth(box_scene, start, small_sensor.intrinsics, small_sensor.mount_offset)
        after = integrate_belief(unknown_belief, obs, registration, small_sensor.intrinsics)
        assert model.predict_one(unknown_belief, start) == pytest.approx(coverage(after.grid))

    def test_belief_is_left_untouched(self, box_scene, box_geometry, unknown_belief, small_sensor):
        before = unknown_belief.grid.state.copy()
        label_rollout(box_scene, unknown_belief.grid, box_geometry.start_viewpoint(),
                      small_sensor.intrinsics, RegistrationConfig())
        np.testing.assert_array_equal(unknown_belief.grid.state, before)

    def test_camera_inside_an_object(self, box_scene, unknown_belief, small_sensor):
        with pytest.raises(InfeasibleViewpointError):
            label_rollout(box_scene, unknown_belief.grid, Viewpoint((0.1, 0.1, 0.05)),
                          small_sensor.intrinsics, RegistrationConfig())


class TestFeatures:

    def test_size_is_fixed_by_the_coarse_shape(self, tiny_dims):
        assert featurize(BeliefGrid.unknown(tiny_dims), (5, 8, 4)).shape == (3 * 5 * 8 * 4,)
        assert featurize(BeliefGrid.unknown(GridDims(7, 9, 5, 0.025)), (5, 8, 4)).shape == (480,)

    def test_unknown_fractions(self, tiny_dims):
        features = featurize(BeliefGrid.unknown(tiny_dims), (2, 2, 2))
        np.testing.assert_array_equal(features[:8], np.ones(8))
        np.testing.assert_array_equal(features[8:], np.zeros(16))

    def test_blocks_without_voxels_read_zero(self):
        features = featurize(BeliefGrid.unknown(GridDims(2, 2, 2, 0.05)), (3, 1, 1))
        np.testing.assert_array_equal(features[:3], [1.0, 1.0, 0.0])

    def test_viewpoint_features(self, tiny_dims):
        features = viewpoint_features(Viewpoint((0.2, 0.1, 0.0), (-1.0, 0.0, 0.0, 0.0)), tiny_dims)
        np.testing.assert_allclose(features, [1.0, 0.5, 0.0, 1.0, 0.0, 0.0, 0.0])


class TestSurrogate:

    def test_forward_shape_and_range(self):
        net = SurrogateNet(SMALL_SCORE, seed=1)
        out = net(torch.rand(4, SMALL_SCORE.feature_size, dtype=torch.float64),
                  torch.rand(4, 7, dtype=torch.float64))
        assert out.shape == (4,)
        assert torch.all((out > 0) & (out < 1))

    def test_wrong_feature_size(self):
        net = SurrogateNet(SMALL_SCORE)
        with pytest.raises(ModelShapeError):
            net(torch.rand(2, 5, dtype=torch.float64), torch.rand(2, 7, dtype=torch.float64))

    def test_seeded_initialisation(self):
        a = net_parameters(SurrogateNet(SMALL_SCORE, seed=3))
        b = net_parameters(SurrogateNet(SMALL_SCORE, seed=3))
        assert all(np.array_equal(a[k], b[k]) for k in a)

    def test_gradients_match_finite_differences(self):
        net = SurrogateNet(SMALL_SCORE, seed=2)
        rng = np.random.default_rng(0)
        grid = torch.from_numpy(rng.random((6, SMALL_SCORE.feature_size)))
        view = torch.from_numpy(rng.random((6, 7)))
        label = torch.from_numpy(rng.random(6))
        checks = gradient_check(net, lambda: torch.mean((net(grid, view) - label) ** 2), per_parameter=5)
        assert checks
        assert all(c.relative_error < 1e-4 or abs(c.analytic - c.numeric) < 1e-9 for c in checks)

    def test_parameters_round_trip(self):
        source = SurrogateNet(SMALL_SCORE, seed=4)
        target = load_parameters(SurrogateNet(SMALL_SCORE, seed=5), net_parameters(source))
        g = torch.rand(3, SMALL_SCORE.feature_size, dtype=torch.float64)
        v = torch.rand(3, 7, dtype=torch.float64)
        assert torch.equal(source(g, v), target(g, v))

    def test_mismatched_parameters(self):
        params = net_parameters(SurrogateNet(SMALL_SCORE))
        other = ScoreConfig(coarse_shape=(2, 2, 2), grid_hidden=(32, 8), view_hidden=8)
        with pytest.raises(ModelShapeError):
            load_parameters(SurrogateNet(other), params)

    def test_training_history(self):
        training = TrainingConfig(epochs=20, batch_size=8, learning_rate=1e-2)
        net, history = train_surrogate(synthetic_pairs(40), None, SMALL_SCORE, training)
        assert len(history.train_loss) == 20
        assert len(history.eval_loss) == 21
        assert history.best_eval < history.initial_eval
        assert isinstance(net, SurrogateNet)

    def test_too_few_pairs(self):
        with pytest.raises(TrainingError):
            train_surrogate(synthetic_pairs(1), None, SMALL_SCORE, TrainingConfig())

    def test_score_wrapper(self, unknown_belief, box_geometry, small_sensor):
        model = SurrogateScore(small_sensor, SMALL_SCORE, SurrogateNet(SMALL_SCORE))
        scores = model.predict(unknown_belief, [box_geometry.start_viewpoint()] * 3)
        assert scores.shape == (3,)
        assert np.all((scores >= 0) & (scores <= 1))
        assert scores[0] == scores[1] == scores[2]


class TestConstantScore:

    def test_value(self, unknown_belief):
        assert ConstantScore(0.25).predict(unknown_belief, [Viewpoint((0.0, 0.0, 0.0))] * 2).tolist() == [0.25, 0.25]

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            ConstantScore(1.5)


class TestFactory:

    def test_kinds(self, small_config, box_scene, box_geometry):
        heuristic = create_score_model("heuristic", small_config, geometry=box_geometry)
        assert isinstance(heuristic, HeuristicScore)
        assert heuristic.closed_faces is box_geometry.closed_faces
        rollout = create_score_model("rollout", small_config, spec=box_scene)
        assert isinstance(rollout, RolloutLabeler) and rollout.spec is box_scene
        surrogate = create_score_model("surrogate", small_config, net=SurrogateNet(small_config.score))
        assert isinstance(surrogate, SurrogateScore)

    def test_surrogate_without_parameters(self):
        with pytest.raises(ScoreModelError):
            create_score_model("surrogate", AnsenseConfig())

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            create_score_model("oracle", AnsenseConfig())

    def test_available(self):
        assert set(get_available_score_models()) == {"rollout", "heuristic", "surrogate"}


class TestTrainingData:

    def test_labels_and_features(self, small_config):
        corpus = generate_training_data(small_config, seed=1)
        assert len(corpus) > 0
        for pair in corpus.pairs:
            assert pair.grid_features.shape == (small_config.score.feature_size,)
            assert pair.view_features.shape == (7,)
            assert 0.0 <= pair.label <= 1.0
        assert all(s < small_config.benchmark.train_seed_limit for s in corpus.scene_seeds)

    def test_seeded(self, small_config):
        a = generate_training_data(small_config, seed=2)
        b = generate_training_data(small_config, seed=2)
        assert [p.label for p in a.pairs] == [p.label for p in b.pairs]
