"""
Bilevel MPC viewpoint generation

Stage one scores a uniform batch and seeds the search with its best viewpoint;
stage two runs cross-entropy rounds of sample, score, select elites and refit.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..core.config import MpcParams
from ..core.utils import STREAM_PLANNING, derive_rng
from ..exceptions import NoFeasibleViewpointError
from ..models.camera import Viewpoint
from ..models.planning import MpcIteration, MpcTrace, ScoredViewpoint
from ..models.registration import BeliefState
from ..motion.context import MotionContext
from ..score.base import Belief, BaseScoreModel
from .sampling import Gaussian, UniformRegion, sample_feasible

logger = logging.getLogger(__name__)


def rank(viewpoints: Sequence[Viewpoint], scores: np.ndarray) -> List[ScoredViewpoint]:
    """Stable descending sort; earlier candidates win ties"""
    order = np.argsort(-np.asarray(scores), kind="stable")
    return [ScoredViewpoint(viewpoints[i], float(scores[i])) for i in order]


def stage1_seed(belief: Belief, score: BaseScoreModel, n: int, rng: np.random.Generator,
                ctx: MotionContext) -> ScoredViewpoint:
    """Best of ``n`` uniform feasible samples (first occurrence on ties)"""
    batch = sample_feasible(ctx, UniformRegion(), n, rng)
    scores = score.predict(belief, batch.viewpoints)
    best = int(np.argmax(scores))
    return ScoredViewpoint(batch.viewpoints[best], float(scores[best]))


def fit_distribution(elites: Sequence[Viewpoint], sigma_floor: float = 1e-3
                     ) -> Tuple[np.ndarray, np.ndarray]:
    """
    Refit the Gaussian to the elites.

    Quaternions are sign-aligned to the first elite's hemisphere before
    averaging and the mean quaternion is renormalised; sigma is the per-dimension
    sample standard deviation floored at ``sigma_floor``.

    Raises:
        ValueError: If fewer than two elites are given
    """
    if len(elites) < 2:
        raise ValueError(f"fit_distribution needs at least 2 elites, got {len(elites)}")
    vectors = np.stack([v.as_vector() for v in elites])
    signs = np.where(vectors[:, 3:] @ vectors[0, 3:] < 0.0, -1.0, 1.0)
    vectors[:, 3:] *= signs[:, None]
    mu = vectors.mean(axis=0)
    norm = np.linalg.norm(mu[3:])
    mu[3:] = mu[3:] / norm if norm > 1e-12 else vectors[0, 3:]
    sigma = np.maximum(vectors.std(axis=0, ddof=1), sigma_floor)
    return mu, sigma


def bilevel_mpc(belief: Belief, score: BaseScoreModel, params: MpcParams, seed: int,
                ctx: MotionContext, trace: Optional[MpcTrace] = None) -> List[ScoredViewpoint]:
    """
    Cross-entropy search over viewpoints seeded by stage one.

    Args:
        belief: Current belief
        score: Score model used for every candidate
        params: Iterations, batch sizes, elite schedule and initial sigma
        seed: Planning seed for this step
        ctx: Feasibility context
        trace: Optional trace receiving one record per iteration

    Returns:
        Final elites sorted by score, descending
    """
    belief = BeliefState.wrap(belief)
    rng = derive_rng(seed, STREAM_PLANNING)
    best = stage1_seed(belief, score, params.stage1_samples, rng, ctx)
    if trace is not None:
        trace.seed_score = best.score
    mu = best.viewpoint.as_vector()
    sigma = np.asarray(params.sigma0, dtype=np.float64)
    elites: List[ScoredViewpoint] = [best]

    for it in range(params.n_iter):
        try:
            batch = sample_feasible(ctx, Gaussian(mu, sigma), params.n_mpc, rng)
        except NoFeasibleViewpointError:
            logger.debug(f"MPC iteration {it}: no feasible samples, keeping distribution")
            if trace is not None:
                trace.iterations.append(MpcIteration(it, mu.tolist(), sigma.tolist(), 0, True, []))
            continue
        candidates = batch.viewpoints
        if params.retain_best:
            candidates = [best.viewpoint] + candidates[: params.n_mpc - 1]
        ranked = rank(candidates, score.predict(belief, candidates))
        round_elites = ranked[: params.elite_schedule[it]]
        if round_elites[0].score > best.score or params.retain_best:
            best = round_elites[0]
        if len(round_elites) >= 2:
            mu, sigma = fit_distribution([e.viewpoint for e in round_elites], params.sigma_floor)
        elites = round_elites
        if trace is not None:
            trace.iterations.append(MpcIteration(it, mu.tolist(), sigma.tolist(), len(batch),
                                                 batch.exhausted, [e.score for e in round_elites]))
        logger.debug(f"MPC iteration {it}: {len(batch)} samples, best {round_elites[0].score:.4f}")

    return elites
