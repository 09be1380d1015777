"""
Random and random-guided viewpoint generation
"""

from typing import List

from ..core.utils import STREAM_PLANNING, derive_rng
from ..models.planning import PolicyKind, ScoredViewpoint
from ..motion.context import MotionContext
from ..score.base import Belief, BaseScoreModel
from .mpc import rank
from .sampling import UniformRegion, sample_feasible


def baseline_policy(kind: PolicyKind, belief: Belief, score: BaseScoreModel, n: int, seed: int,
                    ctx: MotionContext) -> List[ScoredViewpoint]:
    """
    Uniform feasible batch, unscored (RANDOM) or sorted by predicted coverage
    (RANDOM_GUIDED). RANDOM never calls the score model.
    """
    kind = PolicyKind(kind)
    if kind not in (PolicyKind.RANDOM, PolicyKind.RANDOM_GUIDED):
        raise ValueError(f"Not a baseline policy: {kind.value}")
    rng = derive_rng(seed, STREAM_PLANNING)
    batch = sample_feasible(ctx, UniformRegion(), n, rng)
    if kind == PolicyKind.RANDOM:
        return [ScoredViewpoint(v) for v in batch.viewpoints]
    return rank(batch.viewpoints, score.predict(belief, batch.viewpoints))
