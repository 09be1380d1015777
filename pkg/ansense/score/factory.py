"""
Ansense Score Model Factory

Factory pattern for creating score model instances from configuration.
"""

from typing import Optional

from .base import BaseScoreModel
from .heuristic import HeuristicScore
from .rollout import RolloutLabeler
from .surrogate import SurrogateNet, SurrogateScore, load_parameters
from ..core.config import AnsenseConfig, SCORE_MODEL_NAMES
from ..exceptions import ScoreModelError
from ..models.scene import SceneSpec
from ..scene.geometry import SceneGeometry
from ..storage.codecs import read_params_file


def create_score_model(kind: str, config: AnsenseConfig, spec: Optional[SceneSpec] = None,
                       geometry: Optional[SceneGeometry] = None,
                       net: Optional[SurrogateNet] = None) -> BaseScoreModel:
    """
    Create a score model.

    Args:
        kind: "rollout", "heuristic" or "surrogate"
        config: Simulator configuration
        spec: Ground-truth scene, attached to the rollout labeler (oracle access)
        geometry: Scene geometry; its closed walls stop heuristic rays
        net: Trained surrogate; loaded from ``config.score.params_path`` when omitted

    Returns:
        Configured score model

    Raises:
        ValueError: If the kind is not supported
        ScoreModelError: If a surrogate is requested without parameters
    """
    kind = str(getattr(kind, "value", kind)).lower()
    if kind == "rollout":
        return RolloutLabeler(config.sensor, config.registration, spec, seed=config.episode.seed)
    elif kind == "heuristic":
        closed = geometry.closed_faces if geometry is not None else None
        return HeuristicScore(config.sensor, closed)
    elif kind == "surrogate":
        if net is None:
            net = load_surrogate(config)
        return SurrogateScore(config.sensor, config.score, net)
    else:
        raise ValueError(f"Unsupported score model: {kind}")


def load_surrogate(config: AnsenseConfig) -> SurrogateNet:
    """Load trained surrogate parameters from ``config.score.params_path``"""
    if not config.score.params_path:
        raise ScoreModelError("Surrogate score model requires score.params_path (run train-score first)")
    params, _ = read_params_file(config.score.params_path)
    return load_parameters(SurrogateNet(config.score), params)


def get_available_score_models() -> list[str]:
    """Get list of available score model names"""
    return list(SCORE_MODEL_NAMES)
