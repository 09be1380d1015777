"""
Score-guided refinement of a predicted viewpoint
"""

import logging
from typing import List

import numpy as np

from ..exceptions import NoFeasibleViewpointError
from ..models.camera import Viewpoint
from ..models.planning import ScoredViewpoint
from ..motion.context import MotionContext
from ..planners.mpc import rank
from ..planners.sampling import Gaussian, sample_feasible
from ..score.base import Belief, BaseScoreModel

logger = logging.getLogger(__name__)


def refine_viewpoint(v_hat: Viewpoint, sigma: float, score: BaseScoreModel, belief: Belief,
                     n: int, rng: np.random.Generator, ctx: MotionContext) -> List[ScoredViewpoint]:
    """
    Sample feasible viewpoints around ``v_hat`` and rank them by the score model.

    ``v_hat`` itself is candidate 0 when it is feasible, so the top score is
    never below its own.

    Raises:
        NoFeasibleViewpointError: If neither ``v_hat`` nor any sample is feasible
    """
    if n < 1:
        raise ValueError("Refinement sample count must be at least 1")
    candidates: List[Viewpoint] = []
    if ctx.model.is_free(v_hat):
        candidates.append(v_hat)
    remaining = n - len(candidates)
    if remaining > 0:
        try:
            batch = sample_feasible(ctx, Gaussian(v_hat.as_vector(), sigma), remaining, rng)
            candidates.extend(batch.viewpoints)
        except NoFeasibleViewpointError:
            if not candidates:
                raise
    logger.debug(f"Refining around predicted viewpoint with {len(candidates)} candidates")
    return rank(candidates, score.predict(belief, candidates))
