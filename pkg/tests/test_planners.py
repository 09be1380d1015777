"""Feasible sampling, bilevel MPC and the random baselines"""

from dataclasses import replace

import numpy as np
import pytest

from ansense.core.config import MpcParams
from ansense.core.geometry import rotation_matrix
from ansense.exceptions import NoFeasibleViewpointError, SceneGenerationError
from ansense.models.camera import Viewpoint
from ansense.models.grid import BeliefGrid
from ansense.models.planning import MpcTrace, PolicyKind
from ansense.models.registration import BeliefState
from ansense.motion.context import motion_context
from ansense.planners.baselines import baseline_policy
from ansense.planners.mpc import bilevel_mpc, fit_distribution, rank
from ansense.planners.sampling import Gaussian, UniformRegion, sample_feasible
from ansense.score.base import ConstantScore
from ansense.scene.generation import generate_scene
from ansense.scene.geometry import scene_geometry
from ansense.score.heuristic import HeuristicScore


def axis_meets_grid(origin, axis, dims):
    """Whether the ray from origin along axis enters the grid box"""
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = (dims.origin_array - origin) / axis
        t1 = (dims.upper - origin) / axis
    lo = np.nanmax(np.minimum(t0, t1))
    hi = np.nanmin(np.maximum(t0, t1))
    return hi >= max(lo, 0.0)


@pytest.fixture
def heuristic(small_sensor, box_scene):
    return HeuristicScore(small_sensor, box_scene.closed_faces)


class TestSampleFeasible:

    def test_uniform_samples_are_feasible(self, box_context):
        batch = sample_feasible(box_context, UniformRegion(), 30, np.random.default_rng(0))
        assert 0 < len(batch) <= 30
        assert all(box_context.model.is_free(v) for v in batch.viewpoints)

    def test_uniform_axes_pass_through_the_grid(self, box_context):
        batch = sample_feasible(box_context, UniformRegion(), 30, np.random.default_rng(1))
        for v in batch.viewpoints:
            assert np.linalg.norm(v.orientation) == pytest.approx(1.0)
            axis = rotation_matrix(v.orientation) @ np.array([0.0, 0.0, 1.0])
            assert axis_meets_grid(v.position_array, axis, box_context.model.dims)

    def test_offset_optical_centres_are_feasible_and_aimed(self, unknown_belief, box_geometry, small_config):
        offset = np.array([0.11, 0.0, 0.07])
        ctx = motion_context(unknown_belief, box_geometry, small_config.motion, tuple(offset))
        batch = sample_feasible(ctx, UniformRegion(), 30, np.random.default_rng(3))
        assert len(batch) > 0
        for v in batch.viewpoints:
            rotation = rotation_matrix(v.orientation)
            center = v.position_array + rotation @ offset
            assert ctx.model.in_region(center)[0]
            assert axis_meets_grid(center, rotation[:, 2], ctx.model.dims)

    def test_unknown_interior_is_never_sampled(self, box_context):
        batch = sample_feasible(box_context, UniformRegion(), 50, np.random.default_rng(2))
        assert np.all(np.array([v.position[0] for v in batch.viewpoints]) <= 0.0)

    def test_same_rng_same_batch(self, box_context):
        a = sample_feasible(box_context, UniformRegion(), 10, np.random.default_rng(7))
        b = sample_feasible(box_context, UniformRegion(), 10, np.random.default_rng(7))
        assert [v.as_vector().tolist() for v in a.viewpoints] == [v.as_vector().tolist() for v in b.viewpoints]

    def test_gaussian_far_from_the_region_raises(self, box_context):
        dist = Gaussian(np.array([5.0, 5.0, 5.0, 1.0, 0.0, 0.0, 0.0]), np.full(7, 1e-3))
        with pytest.raises(NoFeasibleViewpointError):
            sample_feasible(box_context, dist, 5, np.random.default_rng(0))

    def test_gaussian_samples_concentrate_on_the_mean(self, box_context):
        mu = np.array([-0.3, 0.1, 0.1, 1.0, 0.0, 0.0, 0.0])
        batch = sample_feasible(box_context, Gaussian(mu, np.full(7, 0.01)), 20, np.random.default_rng(0))
        positions = np.array([v.position for v in batch.viewpoints])
        assert np.all(np.abs(positions - mu[:3]) < 0.1)

    def test_count_must_be_positive(self, box_context):
        with pytest.raises(ValueError):
            sample_feasible(box_context, UniformRegion(), 0, np.random.default_rng(0))


class TestRankAndRefit:

    def test_rank_is_stable(self):
        views = [Viewpoint((float(i), 0.0, 0.0)) for i in range(4)]
        ranked = rank(views, np.array([0.2, 0.5, 0.5, 0.1]))
        assert [r.viewpoint.position[0] for r in ranked] == [1.0, 2.0, 0.0, 3.0]
        assert [r.score for r in ranked] == [0.5, 0.5, 0.2, 0.1]

    def test_fit_aligns_quaternion_signs(self):
        q = np.array([0.5, 0.5, 0.5, 0.5])
        elites = [Viewpoint((0.0, 0.0, 0.0), tuple(q)), Viewpoint((0.2, 0.0, 0.0), tuple(-q))]
        mu, sigma = fit_distribution(elites, sigma_floor=1e-3)
        np.testing.assert_allclose(mu[3:], q, atol=1e-12)
        assert mu[0] == pytest.approx(0.1)
        assert np.all(sigma >= 1e-3)

    def test_fit_needs_two_elites(self):
        with pytest.raises(ValueError):
            fit_distribution([Viewpoint((0.0, 0.0, 0.0))])


class TestBilevelMpc:

    def test_retention_is_opt_in(self):
        assert MpcParams().retain_best is False

    def test_retained_best_score_never_regresses(self, unknown_belief, heuristic, small_config, box_context):
        trace = MpcTrace()
        params = replace(small_config.mpc, retain_best=True)
        elites = bilevel_mpc(unknown_belief, heuristic, params, 3, box_context, trace)
        scores = [s for s in trace.best_scores() if s is not None]
        assert scores
        assert trace.seed_score <= scores[0]
        assert all(b >= a for a, b in zip(scores, scores[1:]))
        assert elites[0].score == scores[-1]

    def test_final_elites_follow_the_schedule(self, unknown_belief, heuristic, small_config, box_context):
        elites = bilevel_mpc(unknown_belief, heuristic, small_config.mpc, 5, box_context)
        assert len(elites) == small_config.mpc.elite_schedule[-1]
        assert [e.score for e in elites] == sorted((e.score for e in elites), reverse=True)
        assert all(box_context.model.is_free(e.viewpoint) for e in elites)

    def test_seeded(self, unknown_belief, heuristic, small_config, box_context):
        a = bilevel_mpc(unknown_belief, heuristic, small_config.mpc, 9, box_context)
        b = bilevel_mpc(unknown_belief, heuristic, small_config.mpc, 9, box_context)
        assert a[0].viewpoint.as_vector().tolist() == b[0].viewpoint.as_vector().tolist()


class TestBaselines:

    def test_random_never_scores(self, unknown_belief, heuristic, box_context):
        picks = baseline_policy(PolicyKind.RANDOM, unknown_belief, heuristic, 10, 0, box_context)
        assert picks and all(p.score is None for p in picks)
        assert heuristic.call_count == 0

    def test_guided_sorts_one_batch(self, unknown_belief, heuristic, box_context):
        picks = baseline_policy(PolicyKind.RANDOM_GUIDED, unknown_belief, heuristic, 10, 0, box_context)
        scores = [p.score for p in picks]
        assert scores == sorted(scores, reverse=True)
        assert heuristic.call_count == 1
        assert heuristic.evaluated_count == len(picks)

    def test_guided_ties_keep_draw_order(self, unknown_belief, box_context):
        random = baseline_policy(PolicyKind.RANDOM, unknown_belief, ConstantScore(0.3), 8, 4, box_context)
        guided = baseline_policy(PolicyKind.RANDOM_GUIDED, unknown_belief, ConstantScore(0.3), 8, 4, box_context)
        assert [p.viewpoint.as_vector().tolist() for p in random] == \
            [p.viewpoint.as_vector().tolist() for p in guided]

    def test_mpc_is_not_a_baseline(self, unknown_belief, heuristic, box_context):
        with pytest.raises(ValueError):
            baseline_policy(PolicyKind.BILEVEL_MPC, unknown_belief, heuristic, 10, 0, box_context)


def desk_runs(config, params, n_scenes):
    """Heuristic-scored MPC from an unknown belief on generated scenes"""
    for seed in range(n_scenes):
        try:
            spec = generate_scene(config.scene, seed)
        except SceneGenerationError:
            continue
        geometry = scene_geometry(spec, config.motion)
        belief = BeliefState(BeliefGrid.unknown(spec.dims))
        ctx = motion_context(belief, geometry, config.motion)
        trace = MpcTrace()
        elites = bilevel_mpc(belief, HeuristicScore(config.sensor, spec.closed_faces), params, seed, ctx, trace)
        yield ctx, elites, trace


@pytest.mark.slow
class TestMpcOverDeskScenes:

    def test_final_elites_are_feasible_and_complete(self, small_config):
        runs = list(desk_runs(small_config, small_config.mpc, 100))
        assert len(runs) >= 90
        expected = small_config.mpc.elite_schedule[-1]
        good = sum(len(elites) == expected and all(ctx.model.is_free(e.viewpoint) for e in elites)
                   for ctx, elites, _ in runs)
        assert good >= 0.95 * len(runs)

    def test_retained_best_is_non_decreasing(self, small_config):
        params = replace(small_config.mpc, retain_best=True)
        for _, elites, trace in desk_runs(small_config, params, 100):
            scores = [s for s in trace.best_scores() if s is not None]
            assert all(b >= a for a, b in zip(scores, scores[1:]))
            assert elites[0].score >= trace.seed_score
