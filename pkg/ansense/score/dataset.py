"""
Score training data generation

Random feasible viewpoint sequences are rolled out on generated scenes; every
step records (belief features, viewpoint features, rollout coverage label).
"""

import logging
from typing import List, Optional

from ..core.config import AnsenseConfig
from ..core.utils import (
    STREAM_DATASET, STREAM_SAMPLING, STREAM_SEGMENTATION, derive_rng, derive_seed
)
from ..exceptions import InfeasibleViewpointError, NoFeasibleViewpointError, SceneGenerationError
from ..models.grid import BeliefGrid
from ..models.learning import TrainingCorpus, TrainingPair
from ..models.registration import BeliefState
from ..motion.context import motion_context
from ..planners.sampling import UniformRegion, sample_feasible
from ..scene.coverage import coverage
from ..scene.generation import generate_scene
from ..scene.geometry import scene_geometry
from .features import featurize, viewpoint_features
from .rollout import rollout_belief
from .surrogate import split_pairs

logger = logging.getLogger(__name__)


def training_scene_seeds(seed: int, n_scenes: int, limit: int) -> List[int]:
    """Scene seeds for data generation, all below the evaluation range"""
    return [derive_seed(seed, STREAM_DATASET, i) % limit for i in range(n_scenes)]


def generate_training_data(config: AnsenseConfig, n_scenes: Optional[int] = None,
                           sequences_per_scene: Optional[int] = None,
                           sequence_length: Optional[int] = None,
                           seed: Optional[int] = None) -> TrainingCorpus:
    """
    Roll out random feasible viewpoint sequences and record labelled pairs.

    Args:
        config: Simulator configuration (training section supplies defaults)
        n_scenes: Scenes to generate
        sequences_per_scene: Sequences per scene, each from a fresh belief
        sequence_length: Viewpoints per sequence
        seed: Data seed

    Returns:
        TrainingCorpus with shuffled pairs split into train/eval
    """
    training = config.training
    n_scenes = n_scenes or training.data_scenes
    sequences_per_scene = sequences_per_scene or training.sequences_per_scene
    sequence_length = sequence_length or training.sequence_length
    seed = training.seed if seed is None else seed
    if min(n_scenes, sequences_per_scene, sequence_length) < 1:
        raise ValueError("Data generation counts must be at least 1")

    intr = config.sensor.intrinsics
    pairs: List[TrainingPair] = []
    scene_seeds = training_scene_seeds(seed, n_scenes, config.benchmark.train_seed_limit)
    used_seeds = []
    for scene_seed in scene_seeds:
        try:
            spec = generate_scene(config.scene, scene_seed)
        except SceneGenerationError as e:
            logger.warning(f"Skipping training scene {scene_seed}: {e}")
            continue
        used_seeds.append(scene_seed)
        geometry = scene_geometry(spec, config.motion)
        for seq in range(sequences_per_scene):
            rng = derive_rng(scene_seed, STREAM_SAMPLING, seq)
            belief = BeliefState(BeliefGrid.unknown(spec.dims))
            for step in range(sequence_length):
                ctx = motion_context(belief, geometry, config.motion, config.sensor.mount_offset)
                try:
                    viewpoint = sample_feasible(ctx, UniformRegion(), 1, rng).viewpoints[0]
                    next_belief = rollout_belief(spec, belief, viewpoint, intr, config.registration,
                                                 config.sensor.mount_offset,
                                                 derive_seed(scene_seed, STREAM_SEGMENTATION, seq, step))
                except (NoFeasibleViewpointError, InfeasibleViewpointError) as e:
                    logger.debug(f"Scene {scene_seed} sequence {seq} stopped at step {step}: {e}")
                    break
                pairs.append(TrainingPair(featurize(belief.grid, config.score.coarse_shape),
                                          viewpoint_features(viewpoint, spec.dims),
                                          min(1.0, coverage(next_belief.grid)), scene_seed))
                belief = next_belief
        logger.info(f"Training scene {scene_seed}: {len(pairs)} pairs so far")

    order = derive_rng(seed, STREAM_DATASET).permutation(len(pairs))
    shuffled = [pairs[i] for i in order]
    if len(shuffled) < 2:
        return TrainingCorpus(shuffled, [], used_seeds)
    train, eval_pairs = split_pairs(shuffled, training.eval_fraction)
    return TrainingCorpus(train, eval_pairs, used_seeds)
