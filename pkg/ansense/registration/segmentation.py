"""
Ground-truth segmentation oracle with a per-instance miss probability
"""

import logging
from typing import List

import numpy as np

from ..core.utils import STREAM_SEGMENTATION, derive_rng
from ..models.camera import CameraIntrinsics, Observation
from ..models.registration import PartialCloud
from ..sensor.camera import back_project

logger = logging.getLogger(__name__)


def segment_oracle(obs: Observation, miss_prob: float, seed: int,
                   intr: CameraIntrinsics) -> List[PartialCloud]:
    """
    Group object-hit pixels by ground-truth id and back-project them.

    One uniform draw per visible instance (in ascending id order) decides whether
    the whole instance is dropped (draw < miss_prob).

    Args:
        obs: Observation
        miss_prob: Probability in [0, 1) of missing an instance
        seed: Segmentation seed
        intr: Intrinsics the observation was rendered with

    Returns:
        Partial clouds ordered by ground-truth id
    """
    if not 0.0 <= miss_prob < 1.0:
        raise ValueError("miss_prob must be in [0, 1)")
    rng = derive_rng(seed, STREAM_SEGMENTATION)
    hits = (obs.instance >= 0) & np.isfinite(obs.depth)
    ids = np.unique(obs.instance[hits])
    draws = rng.random(len(ids))
    clouds = []
    for gt_id, draw in zip(ids, draws):
        if draw < miss_prob:
            logger.debug(f"Segmentation missed instance {int(gt_id)}")
            continue
        mask = hits & (obs.instance == gt_id)
        clouds.append(PartialCloud(back_project(obs, intr, mask), int(gt_id)))
    return clouds
