"""
Ansense Viewpoint Policies

Every policy turns the current belief into a ranked candidate batch that the
episode loop walks until a path can be planned.
"""

import logging
from abc import ABC, abstractmethod
from typing import List, Optional

from ..core.config import AnsenseConfig
from ..core.utils import STREAM_PLANNING, derive_rng
from ..exceptions import NoFeasibleViewpointError, ScoreModelError
from ..models.episode import EpisodeLog
from ..models.learning import TokenSequence, TokenStep
from ..models.planning import MpcTrace, PolicyKind, ScoredViewpoint
from ..models.registration import BeliefState
from ..motion.context import MotionContext
from ..planners.baselines import baseline_policy
from ..planners.mpc import bilevel_mpc, rank
from ..planners.sampling import UniformRegion, sample_feasible
from ..score.base import BaseScoreModel
from ..vpformer.model import VPFormer, forward_next_viewpoint
from ..vpformer.refine import refine_viewpoint

logger = logging.getLogger(__name__)


class ViewpointPolicy(ABC):
    """Base class for viewpoint generation policies"""

    kind: PolicyKind

    def __init__(self, config: AnsenseConfig, score: BaseScoreModel):
        self.config = config
        self.score = score
        # trace of the latest proposal, when the policy keeps one
        self.last_trace: Optional[MpcTrace] = None

    @property
    def batch_size(self) -> int:
        return self.config.episode.batch_size

    @abstractmethod
    def propose(self, belief: BeliefState, ctx: MotionContext, log: EpisodeLog,
                seed: int) -> List[ScoredViewpoint]:
        """
        Ranked candidates for the next step.

        Args:
            belief: Current belief
            ctx: Collision model and scene geometry of the belief
            log: Episode so far
            seed: Step seed

        Returns:
            At most ``batch_size`` candidates, best first

        Raises:
            NoFeasibleViewpointError: If no feasible candidate exists
        """
        pass


class RandomPolicy(ViewpointPolicy):
    kind = PolicyKind.RANDOM

    def propose(self, belief, ctx, log, seed):
        return baseline_policy(self.kind, belief, self.score, self.batch_size, seed, ctx)


class RandomGuidedPolicy(ViewpointPolicy):
    """Best of a large uniform batch under the score model"""

    kind = PolicyKind.RANDOM_GUIDED

    def propose(self, belief, ctx, log, seed):
        ranked = baseline_policy(self.kind, belief, self.score, self.config.episode.guided_batch, seed, ctx)
        return ranked[: self.batch_size]


class BilevelMpcPolicy(ViewpointPolicy):
    kind = PolicyKind.BILEVEL_MPC

    def propose(self, belief, ctx, log, seed):
        trace = MpcTrace()
        elites = bilevel_mpc(belief, self.score, self.config.mpc, seed, ctx, trace)
        self.last_trace = trace
        return elites[: self.batch_size]


def stage1_batch(belief: BeliefState, score: BaseScoreModel, n: int, seed: int,
                 ctx: MotionContext) -> List[ScoredViewpoint]:
    """Stage-one uniform batch ranked by the score model"""
    rng = derive_rng(seed, STREAM_PLANNING)
    batch = sample_feasible(ctx, UniformRegion(), n, rng)
    return rank(batch.viewpoints, score.predict(belief, batch.viewpoints))


def episode_tokens(log: EpisodeLog, bounds, max_len: int) -> TokenSequence:
    """Token sequence of an episode: the start token plus one per accepted step"""
    steps = [TokenStep(log.initial_coverage, log.initial_features, log.start_viewpoint)]
    steps += [TokenStep(s.coverage, s.features, s.executed) for s in log.accepted_steps]
    return TokenSequence(tuple(steps[-max_len:]), bounds, max_len)


def token_bounds(ctx: MotionContext):
    box = ctx.geometry.planning_box
    return tuple(box.lo), tuple(box.hi)


class VPFormerPolicy(ViewpointPolicy):
    """
    Model proposals for the first ``model_steps`` steps, refined with the score
    model when refinement is on, then stage-one sampling.
    """

    kind = PolicyKind.VPFORMER

    def __init__(self, config: AnsenseConfig, score: BaseScoreModel, model: Optional[VPFormer]):
        super().__init__(config, score)
        if model is None:
            raise ScoreModelError("VPFormer policy requires a trained model (run train-vpformer first)")
        self.model = model

    def propose(self, belief, ctx, log, seed):
        vp = self.config.vpformer
        if log.num_viewpoints >= vp.model_steps:
            return stage1_batch(belief, self.score, self.config.mpc.stage1_samples, seed, ctx)[: self.batch_size]

        v_hat = forward_next_viewpoint(self.model, episode_tokens(log, token_bounds(ctx), vp.max_len))
        if self.config.episode.refinement_on:
            rng = derive_rng(seed, STREAM_PLANNING)
            try:
                ranked = refine_viewpoint(v_hat, vp.refine_sigma, self.score, belief, vp.refine_samples, rng, ctx)
                return ranked[: self.batch_size]
            except NoFeasibleViewpointError as e:
                logger.debug(f"Refinement found nothing feasible, using stage-one batch: {e}")
        elif ctx.model.is_free(v_hat):
            return [ScoredViewpoint(v_hat)]
        else:
            logger.debug("Predicted viewpoint infeasible without refinement, using stage-one batch")
        return stage1_batch(belief, self.score, self.config.mpc.stage1_samples, seed, ctx)[: self.batch_size]


def create_policy(kind: str, config: AnsenseConfig, score: BaseScoreModel,
                  vpformer: Optional[VPFormer] = None) -> ViewpointPolicy:
    """
    Create a viewpoint policy.

    Raises:
        ValueError: If the policy kind is not supported
    """
    kind = PolicyKind(str(getattr(kind, "value", kind)).lower())
    if kind == PolicyKind.RANDOM:
        return RandomPolicy(config, score)
    elif kind == PolicyKind.RANDOM_GUIDED:
        return RandomGuidedPolicy(config, score)
    elif kind == PolicyKind.BILEVEL_MPC:
        return BilevelMpcPolicy(config, score)
    elif kind == PolicyKind.VPFORMER:
        return VPFormerPolicy(config, score, vpformer)
    raise ValueError(f"Unsupported policy: {kind}")


def get_available_policies() -> List[str]:
    return [k.value for k in PolicyKind]
