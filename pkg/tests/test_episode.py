"""The episode loop: stopping rules, discards, determinism and policies"""

import pytest

from ansense.exceptions import ScoreModelError
from ansense.harness.audit import audit_episode
from ansense.harness.episode import run_episode
from ansense.harness.policies import BilevelMpcPolicy, create_policy, get_available_policies
from ansense.models.camera import Viewpoint
from ansense.models.episode import EpisodeStatus
from ansense.score.base import ConstantScore
from ansense.score.heuristic import HeuristicScore
from ansense.score.rollout import RolloutLabeler
from ansense.vpformer.model import VPFormer


@pytest.fixture
def heuristic(small_sensor, box_scene):
    return HeuristicScore(small_sensor, box_scene.closed_faces)


def episode_config(config, **episode):
    return config.merged({"episode": episode})


class TestStoppingRules:

    def test_first_observation_beats_zero_threshold(self, box_scene, small_config, heuristic):
        config = episode_config(small_config, c_max=0.0, policy="random")
        log = run_episode(box_scene, config, heuristic)
        assert log.status == EpisodeStatus.SUCCESS
        assert log.num_viewpoints == 1
        assert log.final_coverage > 0.0

    @pytest.mark.parametrize("seed", range(6))
    def test_zero_threshold_needs_exactly_one_view_for_any_seed(self, seed, box_scene, two_box_scene,
                                                                small_config, heuristic):
        for policy in ("random", "random_guided"):
            config = episode_config(small_config, c_max=0.0, policy=policy, seed=seed)
            for spec in (box_scene, two_box_scene):
                log = run_episode(spec, config, heuristic)
                assert log.status == EpisodeStatus.SUCCESS
                assert log.num_viewpoints == 1
                assert log.final_coverage > 0.0

    def test_off_target_execution_is_discarded(self, box_scene, small_config, heuristic):
        config = episode_config(small_config, policy="random", noise={"sigma_pos": 1.0})
        log = run_episode(box_scene, config, heuristic)
        assert log.status == EpisodeStatus.STEP_LIMIT
        assert log.num_viewpoints == 0
        assert log.discarded_count == 3
        assert log.final_coverage == log.initial_coverage == 0.0
        assert all(s.executed is not None for s in log.steps)

    def test_discard_limit(self, box_scene, small_config, heuristic):
        config = episode_config(small_config, policy="random", noise={"sigma_pos": 1.0}, max_discards=1)
        log = run_episode(box_scene, config, heuristic)
        assert len(log.steps) == 1
        assert log.status == EpisodeStatus.STEP_LIMIT


@pytest.mark.parametrize("policy", ["random", "random_guided", "bilevel_mpc"])
def test_policies_run_to_completion(policy, box_scene, small_config, small_sensor):
    config = episode_config(small_config, policy=policy)
    log = run_episode(box_scene, config, HeuristicScore(small_sensor, box_scene.closed_faces))
    assert log.policy == policy
    assert log.status in (EpisodeStatus.SUCCESS, EpisodeStatus.STEP_LIMIT, EpisodeStatus.PLANNING_FAILURE)
    assert log.num_viewpoints <= config.episode.t_max
    assert log.is_monotone()
    assert [s.t for s in log.accepted_steps] == list(range(1, log.num_viewpoints + 1))

    again = run_episode(box_scene, config, HeuristicScore(small_sensor, box_scene.closed_faces))
    assert again.to_dict() == log.to_dict()


def test_steps_record_costs(box_scene, small_config, heuristic):
    log = run_episode(box_scene, episode_config(small_config, policy="random_guided"), heuristic)
    assert log.num_viewpoints > 0
    for step in log.accepted_steps:
        assert step.path is not None
        assert step.path.goal == step.viewpoint
        assert step.cspace >= step.workspace >= 0.0
        assert step.candidates_tried >= 1
        assert step.predicted is not None
        assert step.features.shape == (small_config.score.feature_size,)


def test_snapshots_pass_the_audit(box_scene, small_config, heuristic):
    config = episode_config(small_config, policy="random", record_snapshots=True)
    log = run_episode(box_scene, config, heuristic)
    report = audit_episode(log, config.motion)
    assert report.ok
    assert report.checked == sum(1 for s in log.steps if s.path is not None)
    assert not report.missing
    for step in log.accepted_steps:
        assert step.observation is not None and step.grid is not None


def test_steps_without_snapshots_are_reported_missing(box_scene, small_config, heuristic):
    log = run_episode(box_scene, episode_config(small_config, policy="random"), heuristic)
    report = audit_episode(log, small_config.motion)
    assert report.checked == 0
    assert len(report.missing) == len(log.steps)


def test_rollout_score_is_attached_to_the_scene(box_scene, small_config, small_sensor):
    score = RolloutLabeler(small_sensor, small_config.registration)
    log = run_episode(box_scene, episode_config(small_config, policy="random_guided", t_max=1), score)
    assert score.spec is box_scene
    assert log.num_viewpoints <= 1


class TestVPFormerPolicy:

    def test_requires_a_model(self, box_scene, small_config, heuristic):
        with pytest.raises(ScoreModelError):
            run_episode(box_scene, episode_config(small_config, policy="vpformer"), heuristic)

    def test_untrained_model_still_runs(self, box_scene, small_config, heuristic):
        config = episode_config(small_config, policy="vpformer")
        model = VPFormer(config.vpformer, config.score.feature_size, seed=0).eval()
        log = run_episode(box_scene, config, heuristic, vpformer=model)
        assert log.policy == "vpformer"
        assert log.num_viewpoints <= config.episode.t_max
        assert log.is_monotone()

    def test_infeasible_prediction_falls_back_to_sampling(self, box_scene, small_config, heuristic, monkeypatch):
        far = Viewpoint((5.0, 5.0, 5.0))
        monkeypatch.setattr("ansense.harness.policies.forward_next_viewpoint", lambda model, tokens: far)
        config = episode_config(small_config, policy="vpformer", refinement_on=True, t_max=1)
        model = VPFormer(config.vpformer, config.score.feature_size, seed=0).eval()
        log = run_episode(box_scene, config, heuristic, vpformer=model)
        assert log.status != EpisodeStatus.PLANNING_FAILURE
        assert log.num_viewpoints == 1
        assert log.accepted_steps[0].viewpoint != far


class TestPolicyFactory:

    def test_kinds(self, small_config):
        policy = create_policy("BILEVEL_MPC", small_config, ConstantScore(0.5))
        assert isinstance(policy, BilevelMpcPolicy)
        assert policy.last_trace is None

    def test_unknown_kind(self, small_config):
        with pytest.raises(ValueError):
            create_policy("greedy", small_config, ConstantScore(0.5))

    def test_available(self):
        assert get_available_policies() == ["random", "random_guided", "bilevel_mpc", "vpformer"]
