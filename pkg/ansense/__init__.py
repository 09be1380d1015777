"""
Ansense - Active next-best-view sensing simulator

Procedural cabinet scenes, a simulated depth camera, scene registration with
shape completion, learned and analytic viewpoint scores, sampling-based and
sequence-model planners, and a benchmark harness.
"""

__version__ = "0.1.0"

from .core.config import AnsenseConfig, EpisodeConfig, MpcParams
from .models.episode import EpisodeLog, EpisodeStatus, MetricsTable
from .models.scene import SceneSpec
from .ansense import Ansense, create_ansense, load_config, load_vpformer

__all__ = [
    "Ansense",
    "create_ansense",
    "load_config",
    "load_vpformer",
    "AnsenseConfig",
    "EpisodeConfig",
    "MpcParams",
    "EpisodeLog",
    "EpisodeStatus",
    "MetricsTable",
    "SceneSpec",
]
