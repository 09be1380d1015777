"""
Expert trajectories from bilevel MPC episodes
"""

import logging
from typing import List, Optional

from ..core.config import AnsenseConfig
from ..core.utils import STREAM_DATASET, derive_seed
from ..exceptions import AnsenseError
from ..harness.episode import run_episode
from ..models.episode import EpisodeLog
from ..models.learning import ExpertDataset, ExpertTrajectory, TokenSequence, TokenStep
from ..scene.generation import generate_scene
from ..scene.geometry import scene_geometry
from ..score.dataset import training_scene_seeds
from ..score.factory import create_score_model
from ..score.surrogate import SurrogateNet

logger = logging.getLogger(__name__)


def trajectory_from_log(log: EpisodeLog, bounds, max_len: int) -> Optional[ExpertTrajectory]:
    """
    Tokens (start, accepted steps but the last) with the next executed viewpoint
    as the target of each; None when the episode accepted no viewpoint.
    """
    accepted = log.accepted_steps[:max_len]
    if not accepted:
        return None
    steps = [TokenStep(log.initial_coverage, log.initial_features, log.start_viewpoint)]
    steps += [TokenStep(s.coverage, s.features, s.executed) for s in accepted[:-1]]
    targets = tuple(s.executed for s in accepted)
    return ExpertTrajectory(TokenSequence(tuple(steps), bounds, max_len), targets, log.scene_seed)


def collect_expert_data(config: AnsenseConfig, n_scenes: Optional[int] = None,
                        seed: Optional[int] = None,
                        net: Optional[SurrogateNet] = None) -> ExpertDataset:
    """
    Run bilevel MPC episodes on generated training scenes and record one
    trajectory per episode.

    Scenes that fail to generate and episodes that raise are skipped and
    counted in ``ExpertDataset.skipped``.
    """
    n_scenes = n_scenes or config.training.expert_scenes
    seed = config.training.seed if seed is None else seed
    if n_scenes < 1:
        raise ValueError("n_scenes must be at least 1")
    expert = config.merged({"episode": {"policy": "bilevel_mpc", "record_snapshots": False}})
    max_len = config.vpformer.max_len

    dataset = ExpertDataset()
    trajectories: List[ExpertTrajectory] = []
    scene_seeds = training_scene_seeds(derive_seed(seed, STREAM_DATASET), n_scenes,
                                       config.benchmark.train_seed_limit)
    for scene_seed in scene_seeds:
        try:
            spec = generate_scene(expert.scene, scene_seed)
            geometry = scene_geometry(spec, expert.motion)
            score = create_score_model(expert.episode.score_model, expert, spec, geometry, net)
            log = run_episode(spec, expert, score)
        except AnsenseError as e:
            dataset.skipped += 1
            logger.warning(f"Skipping expert scene {scene_seed}: {e}")
            continue
        box = geometry.planning_box
        trajectory = trajectory_from_log(log, (tuple(box.lo), tuple(box.hi)), max_len)
        if trajectory is None:
            dataset.skipped += 1
            logger.warning(f"Expert episode on scene {scene_seed} accepted no viewpoint")
            continue
        trajectories.append(trajectory)

    dataset.trajectories = trajectories
    logger.info(f"Collected {len(trajectories)} expert trajectories ({dataset.skipped} skipped)")
    return dataset
