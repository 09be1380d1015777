"""Masked attention, the sequence planner, refinement and behaviour cloning"""

import numpy as np
import pytest
import torch

from ansense.core.config import TrainingConfig, VpformerConfig
from ansense.exceptions import ModelShapeError, NoFeasibleViewpointError, TrainingError
from ansense.harness.benchmark import run_ablation, run_benchmark
from ansense.models.camera import Viewpoint
from ansense.models.learning import ExpertDataset, ExpertTrajectory, TokenSequence, TokenStep
from ansense.score.gradcheck import gradient_check
from ansense.score.heuristic import HeuristicScore
from ansense.vpformer.attention import MaskedSelfAttention, causal_mask, masked_attention
from ansense.vpformer.expert import collect_expert_data
from ansense.vpformer.model import VPFormer, forward_next_viewpoint, sequence_tensors
from ansense.vpformer.refine import refine_viewpoint
from ansense.vpformer.training import bc_loss, train_bc, trajectory_batch

FEATURES = 6
BOUNDS = ((-0.6, 0.0, 0.0), (0.2, 0.2, 0.2))
CONFIG = VpformerConfig(width=32, n_heads=4, n_layers=2, ffn_width=64, max_len=4)


def random_sequence(rng, length, max_len=4):
    steps = []
    coverage = 0.0
    for _ in range(length):
        coverage += float(rng.uniform(0.0, 0.1))
        quat = rng.normal(size=4)
        steps.append(TokenStep(coverage, rng.random(FEATURES),
                               Viewpoint(tuple(rng.uniform(BOUNDS[0], BOUNDS[1])), tuple(quat / np.linalg.norm(quat)))))
    return TokenSequence(tuple(steps), BOUNDS, max_len)


def model_inputs(sequences, length):
    return sequence_tensors(sequences, FEATURES, length)[:5]


class TestAttention:

    def test_causal_mask(self):
        mask = causal_mask(3)
        assert torch.equal(torch.isinf(mask), torch.triu(torch.ones(3, 3, dtype=torch.bool), diagonal=1))
        assert torch.all(mask[~torch.isinf(mask)] == 0)

    def test_weights_are_row_stochastic_and_causal(self):
        gen = torch.Generator().manual_seed(0)
        q, k, v = (torch.randn(2, 5, 8, generator=gen, dtype=torch.float64) for _ in range(3))
        out, weights = masked_attention(q, k, v, causal_mask(5), return_weights=True)
        assert out.shape == (2, 5, 8)
        torch.testing.assert_close(weights.sum(dim=-1), torch.ones(2, 5, dtype=torch.float64))
        upper = torch.triu(torch.ones(5, 5, dtype=torch.bool), diagonal=1)
        assert torch.all(weights[:, upper] == 0)

    def test_first_position_copies_its_value(self):
        gen = torch.Generator().manual_seed(1)
        q, k, v = (torch.randn(1, 4, 8, generator=gen, dtype=torch.float64) for _ in range(3))
        out = masked_attention(q, k, v, causal_mask(4))
        torch.testing.assert_close(out[0, 0], v[0, 0])

    def test_shape_errors(self):
        q = torch.zeros(1, 3, 4, dtype=torch.float64)
        with pytest.raises(ModelShapeError):
            masked_attention(q, torch.zeros(1, 3, 5, dtype=torch.float64), q)
        with pytest.raises(ModelShapeError):
            masked_attention(q, q, q, causal_mask(4))

    def test_heads_must_divide_width(self):
        with pytest.raises(ModelShapeError):
            MaskedSelfAttention(30, 4)


class TestVPFormer:

    def test_outputs_are_valid_viewpoints(self):
        model = VPFormer(CONFIG, FEATURES, seed=1)
        seqs = [random_sequence(np.random.default_rng(i), 4) for i in range(3)]
        out = model(*model_inputs(seqs, 4))
        assert out.shape == (3, 4, 7)
        assert torch.all(out[..., :3] >= torch.tensor(BOUNDS[0], dtype=torch.float64))
        assert torch.all(out[..., :3] <= torch.tensor(BOUNDS[1], dtype=torch.float64))
        torch.testing.assert_close(out[..., 3:].norm(dim=-1), torch.ones(3, 4, dtype=torch.float64))

    def test_later_tokens_do_not_change_earlier_outputs(self):
        model = VPFormer(CONFIG, FEATURES, seed=2).eval()
        coverage, features, views, lo, hi = model_inputs([random_sequence(np.random.default_rng(3), 4)], 4)
        base = model(coverage, features, views, lo, hi)
        features2, views2, coverage2 = features.clone(), views.clone(), coverage.clone()
        features2[0, 3] += 5.0
        views2[0, 3, :3] += 0.1
        coverage2[0, 3] = 0.9
        changed = model(coverage2, features2, views2, lo, hi)
        assert torch.equal(base[0, :3], changed[0, :3])
        assert not torch.equal(base[0, 3], changed[0, 3])

    def test_padding_does_not_leak_into_valid_positions(self):
        model = VPFormer(CONFIG, FEATURES, seed=4).eval()
        seq = random_sequence(np.random.default_rng(5), 2)
        with torch.no_grad():
            short = model(*model_inputs([seq], 2))
            padded = model(*model_inputs([seq], 4))
        torch.testing.assert_close(short[0], padded[0, :2], rtol=0, atol=1e-10)
        predicted = forward_next_viewpoint(model, seq)
        np.testing.assert_allclose(predicted.as_vector(), short[0, 1].numpy(), atol=1e-9)

    def test_sequence_tensors_mark_padding(self):
        seq = random_sequence(np.random.default_rng(6), 2)
        *_, views, lo, hi, valid = sequence_tensors([seq], FEATURES, 4)
        assert valid.tolist() == [[True, True, False, False]]
        assert views[0, 3].tolist() == [0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0]
        assert lo[0].tolist() == list(BOUNDS[0]) and hi[0].tolist() == list(BOUNDS[1])
        assert torch.all(views[0, :2, 3] >= 0)

    def test_shape_checks(self):
        model = VPFormer(CONFIG, FEATURES)
        too_long = model_inputs([random_sequence(np.random.default_rng(7), 4, max_len=8)], 4)
        coverage, features, views, lo, hi = too_long
        with pytest.raises(ModelShapeError):
            model(torch.cat([coverage, coverage], 1), torch.cat([features, features], 1),
                  torch.cat([views, views], 1), lo, hi)
        with pytest.raises(ModelShapeError):
            model(coverage, features[..., :3], views, lo, hi)

    def test_gradients_match_finite_differences(self):
        model = VPFormer(VpformerConfig(width=16, n_heads=2, n_layers=1, ffn_width=16, max_len=3), FEATURES, seed=3)
        seqs = [random_sequence(np.random.default_rng(i), 3, max_len=3) for i in range(2)]
        targets = torch.from_numpy(np.random.default_rng(9).random((2, 3, 7)))
        inputs = model_inputs(seqs, 3)
        valid = torch.ones(2, 3, dtype=torch.bool)
        checks = gradient_check(model, lambda: bc_loss(model, inputs, targets, valid), per_parameter=3)
        assert all(c.relative_error < 1e-4 or abs(c.analytic - c.numeric) < 1e-9 for c in checks)


class TestRefine:

    def test_prediction_is_kept_as_a_candidate(self, unknown_belief, box_scene, box_context, small_sensor):
        score = HeuristicScore(small_sensor, box_scene.closed_faces)
        v_hat = box_context.geometry.start_viewpoint()
        ranked = refine_viewpoint(v_hat, 0.02, score, unknown_belief, 8, np.random.default_rng(0), box_context)
        assert 1 <= len(ranked) <= 8
        assert any(r.viewpoint == v_hat for r in ranked)
        assert ranked[0].score >= score.predict_one(unknown_belief, v_hat)

    def test_nothing_feasible(self, unknown_belief, box_context, small_sensor):
        v_hat = Viewpoint((3.0, 3.0, 3.0))
        with pytest.raises(NoFeasibleViewpointError):
            refine_viewpoint(v_hat, 1e-3, HeuristicScore(small_sensor), unknown_belief, 4,
                             np.random.default_rng(0), box_context)


def fixed_target_trajectories(n):
    """Every step should go to the same viewpoint"""
    target = Viewpoint((-0.3, 0.1, 0.1))
    trajectories = []
    for i in range(n):
        tokens = random_sequence(np.random.default_rng(100 + i), 3)
        trajectories.append(ExpertTrajectory(tokens, (target,) * 3, scene_seed=i))
    return trajectories


class TestBehaviourCloning:

    def test_batch_targets(self):
        inputs, targets, valid = trajectory_batch(fixed_target_trajectories(2), FEATURES, 4)
        assert targets.shape == (2, 4, 7)
        assert valid[:, :3].all() and not valid[:, 3].any()
        assert targets[0, 0, :3].tolist() == [-0.3, 0.1, 0.1]

    def test_training_reduces_eval_loss(self):
        dataset = ExpertDataset(fixed_target_trajectories(8))
        training = TrainingConfig(epochs=30, batch_size=4, learning_rate=5e-3)
        model, history = train_bc(dataset, CONFIG, training)
        assert len(history.eval_loss) == 31
        assert history.best_eval < history.initial_eval
        assert not model.training

    def test_needs_two_trajectories(self):
        with pytest.raises(TrainingError):
            train_bc(ExpertDataset(fixed_target_trajectories(1)), CONFIG, TrainingConfig())

    @pytest.mark.slow
    def test_held_out_error_drops_well_below_initialisation(self):
        trajectories = fixed_target_trajectories(12)
        training = TrainingConfig(epochs=60, batch_size=4, learning_rate=5e-3)
        _, history = train_bc(ExpertDataset(trajectories[:8]), CONFIG, training, eval_trajectories=trajectories[8:])
        assert history.best_eval <= 0.7 * history.initial_eval


@pytest.mark.slow
def test_collect_expert_data(small_config):
    dataset = collect_expert_data(small_config, n_scenes=2, seed=0)
    assert len(dataset) + dataset.skipped == 2
    for trajectory in dataset.trajectories:
        assert len(trajectory.targets) == len(trajectory.tokens) <= small_config.vpformer.max_len
        coverages = [s.coverage for s in trajectory.tokens.steps]
        assert coverages == sorted(coverages)


@pytest.fixture
def expert_model(small_config):
    """Sequence model cloned from MPC episodes on training scenes"""
    config = small_config.merged({"episode": {"t_max": 8}})
    model, _ = train_bc(collect_expert_data(config, n_scenes=12, seed=0), config.vpformer, config.training)
    return config, model


@pytest.mark.slow
class TestVPFormerBenchmark:

    def test_views_stay_close_to_mpc(self, expert_model):
        config, model = expert_model
        run = run_benchmark(config, n_scenes=20, policies=["bilevel_mpc", "vpformer"], seed=4, vpformer=model)
        assert run.table.row("vpformer").viewpoints[0] <= run.table.row("bilevel_mpc").viewpoints[0] + 1.0

    def test_refinement_saves_views(self, expert_model):
        config, model = expert_model
        runs = run_ablation("refinement", config, n_scenes=20, seed=5, vpformer=model)
        assert runs["off"].table.row("vpformer").viewpoints[0] >= runs["on"].table.row("vpformer").viewpoints[0]
