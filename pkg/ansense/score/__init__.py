"""Score models predicting post-observation coverage"""

from .base import BaseScoreModel, ConstantScore
from .features import featurize, viewpoint_features, viewpoint_feature_batch, VIEW_FEATURES
from .heuristic import HeuristicScore, heuristic_gain, unknown_voxels_in_view
from .rollout import RolloutLabeler, label_rollout, rollout_belief
from .surrogate import SurrogateNet, SurrogateScore, train_surrogate, split_pairs
from .gradcheck import GradientCheck, gradient_check
from .factory import create_score_model, get_available_score_models

__all__ = [
    "BaseScoreModel", "ConstantScore",
    "featurize", "viewpoint_features", "viewpoint_feature_batch", "VIEW_FEATURES",
    "HeuristicScore", "heuristic_gain", "unknown_voxels_in_view",
    "RolloutLabeler", "label_rollout", "rollout_belief",
    "SurrogateNet", "SurrogateScore", "train_surrogate", "split_pairs",
    "GradientCheck", "gradient_check",
    "create_score_model", "get_available_score_models",
]
