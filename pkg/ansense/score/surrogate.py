"""
Learned score surrogate

A small fully-connected network over coarse belief features and viewpoint
features, trained with a mean-squared-error objective on rollout labels.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch
from torch import nn

from ..core.config import ScoreConfig, SensorConfig, TrainingConfig
from ..core.utils import STREAM_TRAINING, derive_rng
from ..exceptions import ModelShapeError, TrainingError
from ..models.camera import Viewpoint
from ..models.learning import TrainingHistory, TrainingPair
from ..models.planning import ScoreModelKind
from ..models.registration import BeliefState
from .base import BaseScoreModel
from .features import VIEW_FEATURES, featurize, viewpoint_feature_batch

logger = logging.getLogger(__name__)

DTYPE = torch.float64


def seeded_init_(module: nn.Module, seed: int) -> nn.Module:
    """Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) for every Linear layer, drawn from a numpy stream"""
    rng = derive_rng(seed, STREAM_TRAINING)
    with torch.no_grad():
        for layer in module.modules():
            if isinstance(layer, nn.Linear):
                bound = 1.0 / math.sqrt(layer.in_features)
                layer.weight.copy_(torch.from_numpy(rng.uniform(-bound, bound, size=tuple(layer.weight.shape))))
                if layer.bias is not None:
                    layer.bias.copy_(torch.from_numpy(rng.uniform(-bound, bound, size=tuple(layer.bias.shape))))
    return module


class SurrogateNet(nn.Module):
    """grid features -> 2 ReLU layers; viewpoint -> 1 ReLU layer; concat -> sigmoid"""

    def __init__(self, config: ScoreConfig, seed: int = 0):
        super().__init__()
        h1, h2 = config.grid_hidden
        self.feature_size = config.feature_size
        self.grid_encoder = nn.Sequential(
            nn.Linear(config.feature_size, h1), nn.ReLU(),
            nn.Linear(h1, h2), nn.ReLU(),
        )
        self.view_encoder = nn.Sequential(nn.Linear(VIEW_FEATURES, config.view_hidden), nn.ReLU())
        self.head = nn.Linear(h2 + config.view_hidden, 1)
        self.to(DTYPE)
        seeded_init_(self, seed)

    def forward(self, grid_features: torch.Tensor, view_features: torch.Tensor) -> torch.Tensor:
        if grid_features.shape[-1] != self.feature_size or view_features.shape[-1] != VIEW_FEATURES:
            raise ModelShapeError(
                f"Expected feature sizes ({self.feature_size}, {VIEW_FEATURES}), got "
                f"({grid_features.shape[-1]}, {view_features.shape[-1]})")
        z_s = self.grid_encoder(grid_features)
        z_v = self.view_encoder(view_features)
        return torch.sigmoid(self.head(torch.cat([z_s, z_v], dim=-1))).squeeze(-1)


def _stack(pairs: Sequence[TrainingPair]) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    grid = torch.from_numpy(np.stack([p.grid_features for p in pairs]).astype(np.float64))
    view = torch.from_numpy(np.stack([p.view_features for p in pairs]).astype(np.float64))
    label = torch.tensor([p.label for p in pairs], dtype=DTYPE)
    return grid, view, label


def _mse(net: SurrogateNet, data: Tuple[torch.Tensor, torch.Tensor, torch.Tensor]) -> float:
    grid, view, label = data
    with torch.no_grad():
        return float(torch.mean((net(grid, view) - label) ** 2))


def split_pairs(pairs: Sequence[TrainingPair], eval_fraction: float
                ) -> Tuple[List[TrainingPair], List[TrainingPair]]:
    """Leading (1 - eval_fraction) share trains, the rest evaluates; at least one of each"""
    n_eval = min(len(pairs) - 1, max(1, int(round(len(pairs) * eval_fraction))))
    cut = len(pairs) - n_eval
    return list(pairs[:cut]), list(pairs[cut:])


def train_surrogate(train: Sequence[TrainingPair], eval_pairs: Optional[Sequence[TrainingPair]],
                    score_config: ScoreConfig, training: TrainingConfig
                    ) -> Tuple[SurrogateNet, TrainingHistory]:
    """
    Fit the surrogate with Adam on the mean squared coverage error.

    When ``eval_pairs`` is None the training pairs are split by
    ``training.eval_fraction``. The returned network holds the parameters of the
    epoch with the lowest eval loss (epoch 0 = initialisation).

    Raises:
        TrainingError: On fewer than two pairs or a non-finite loss
    """
    train = list(train)
    if eval_pairs is None:
        if len(train) < 2:
            raise TrainingError(f"Surrogate training needs at least 2 pairs, got {len(train)}")
        train, eval_pairs = split_pairs(train, training.eval_fraction)
    eval_pairs = list(eval_pairs)
    if not train or not eval_pairs or len(train) + len(eval_pairs) < 2:
        raise TrainingError("Surrogate training needs non-empty train and eval splits")

    net = SurrogateNet(score_config, training.seed)
    optimizer = torch.optim.Adam(net.parameters(), lr=training.learning_rate)
    train_data, eval_data = _stack(train), _stack(eval_pairs)
    rng = derive_rng(training.seed, STREAM_TRAINING, 1)

    history = TrainingHistory(eval_loss=[_mse(net, eval_data)])
    best_state = {k: v.clone() for k, v in net.state_dict().items()}
    n = len(train)
    for epoch in range(1, training.epochs + 1):
        order = torch.from_numpy(rng.permutation(n))
        total = 0.0
        for start in range(0, n, training.batch_size):
            idx = order[start:start + training.batch_size]
            grid, view, label = (t[idx] for t in train_data)
            optimizer.zero_grad()
            loss = torch.mean((net(grid, view) - label) ** 2)
            if not torch.isfinite(loss):
                raise TrainingError(f"Non-finite surrogate loss at epoch {epoch}, batch starting {start}")
            loss.backward()
            optimizer.step()
            total += float(loss) * len(idx)
        history.train_loss.append(total / n)
        history.eval_loss.append(_mse(net, eval_data))
        if history.eval_loss[-1] < history.eval_loss[history.best_epoch]:
            history.best_epoch = epoch
            best_state = {k: v.clone() for k, v in net.state_dict().items()}
        if epoch % 10 == 0 or epoch == training.epochs:
            logger.info(f"Surrogate epoch {epoch}: train {history.train_loss[-1]:.6f}, "
                        f"eval {history.eval_loss[-1]:.6f}")

    net.load_state_dict(best_state)
    logger.info(f"Surrogate trained: best eval {history.best_eval:.6f} at epoch {history.best_epoch} "
                f"(initial {history.initial_eval:.6f})")
    return net, history


def net_parameters(net: nn.Module) -> Dict[str, np.ndarray]:
    """Named parameter arrays for serialisation"""
    return {name: t.detach().cpu().numpy().copy() for name, t in net.state_dict().items()}


def load_parameters(net: nn.Module, params: Dict[str, np.ndarray]) -> nn.Module:
    """Load named arrays, checking names and shapes"""
    expected = net.state_dict()
    if set(expected) != set(params):
        raise ModelShapeError(f"Parameter names differ: {sorted(set(expected) ^ set(params))}")
    for name, tensor in expected.items():
        if tuple(tensor.shape) != tuple(np.shape(params[name])):
            raise ModelShapeError(f"Parameter {name}: expected {tuple(tensor.shape)}, "
                                  f"got {tuple(np.shape(params[name]))}")
    net.load_state_dict({k: torch.from_numpy(np.asarray(v, dtype=np.float64)) for k, v in params.items()})
    return net


class SurrogateScore(BaseScoreModel):
    """Score model backed by a trained SurrogateNet"""

    kind = ScoreModelKind.SURROGATE

    def __init__(self, sensor: SensorConfig, config: ScoreConfig, net: Optional[SurrogateNet] = None):
        super().__init__(sensor)
        self.config = config
        self.net = net or SurrogateNet(config)
        self.net.eval()

    def _score_batch(self, belief: BeliefState, viewpoints: Sequence[Viewpoint]) -> np.ndarray:
        grid = belief.grid
        g = torch.from_numpy(featurize(grid, self.config.coarse_shape)).unsqueeze(0)
        v = torch.from_numpy(viewpoint_feature_batch(list(viewpoints), grid.dims))
        with torch.no_grad():
            return self.net(g.expand(len(viewpoints), -1), v).numpy()
