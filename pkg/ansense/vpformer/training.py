"""
Behaviour cloning of the sequence planner on expert trajectories
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np
import torch

from ..core.config import TrainingConfig, VpformerConfig
from ..core.geometry import canonical_quaternion
from ..core.utils import STREAM_TRAINING, derive_rng
from ..exceptions import TrainingError
from ..models.learning import ExpertDataset, ExpertTrajectory, TrainingHistory
from ..score.surrogate import DTYPE
from .model import VPFormer, sequence_tensors

logger = logging.getLogger(__name__)


def trajectory_batch(trajectories: Sequence[ExpertTrajectory], feature_size: int, length: int
                     ) -> Tuple[Tuple[torch.Tensor, ...], torch.Tensor, torch.Tensor]:
    """Model inputs, (B, L, 7) targets and (B, L) validity mask of a padded batch"""
    inputs = sequence_tensors([t.tokens for t in trajectories], feature_size, length)
    targets = np.zeros((len(trajectories), length, 7))
    targets[..., 3] = 1.0
    for b, traj in enumerate(trajectories):
        for i, target in enumerate(traj.targets[:length]):
            targets[b, i, :3] = target.position
            targets[b, i, 3:] = canonical_quaternion(target.orientation_array)
    return inputs[:5], torch.from_numpy(targets).to(DTYPE), inputs[5]


def bc_loss(model: VPFormer, inputs: Tuple[torch.Tensor, ...], targets: torch.Tensor,
            valid: torch.Tensor) -> torch.Tensor:
    """Mean squared viewpoint error over every valid sequence position"""
    pred = model(*inputs)
    err = ((pred - targets) ** 2).mean(dim=-1)
    return err[valid].mean()


def split_trajectories(trajectories: Sequence[ExpertTrajectory], eval_fraction: float
                       ) -> Tuple[List[ExpertTrajectory], List[ExpertTrajectory]]:
    n_eval = min(len(trajectories) - 1, max(1, int(round(len(trajectories) * eval_fraction))))
    cut = len(trajectories) - n_eval
    return list(trajectories[:cut]), list(trajectories[cut:])


def train_bc(dataset: ExpertDataset, vp_config: VpformerConfig, training: TrainingConfig,
             eval_trajectories: Optional[Sequence[ExpertTrajectory]] = None
             ) -> Tuple[VPFormer, TrainingHistory]:
    """
    Behaviour cloning on ground-truth token prefixes with Adam.

    Trajectories are split into train/eval by ``training.eval_fraction`` unless
    ``eval_trajectories`` is given; the best-eval parameters are returned.

    Raises:
        TrainingError: On fewer than two trajectories or a non-finite loss
    """
    trajectories = list(dataset.trajectories)
    if eval_trajectories is None:
        if len(trajectories) < 2:
            raise TrainingError(f"Behaviour cloning needs at least 2 trajectories, got {len(trajectories)}")
        rng = derive_rng(training.seed, STREAM_TRAINING, 2)
        trajectories = [trajectories[i] for i in rng.permutation(len(trajectories))]
        train, eval_set = split_trajectories(trajectories, training.eval_fraction)
    else:
        train, eval_set = trajectories, list(eval_trajectories)
    if not train or not eval_set:
        raise TrainingError("Behaviour cloning needs non-empty train and eval trajectories")

    feature_size = len(train[0].tokens.steps[0].features)
    length = min(vp_config.max_len, max(len(t.tokens) for t in train + eval_set))
    model = VPFormer(vp_config, feature_size, training.seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=training.learning_rate)
    eval_batch = trajectory_batch(eval_set, feature_size, length)
    train_batch = trajectory_batch(train, feature_size, length)

    def evaluate() -> float:
        model.eval()
        with torch.no_grad():
            return float(bc_loss(model, *eval_batch))

    history = TrainingHistory(eval_loss=[evaluate()])
    best_state = {k: v.clone() for k, v in model.state_dict().items()}
    rng = derive_rng(training.seed, STREAM_TRAINING, 3)
    n = len(train)
    for epoch in range(1, training.epochs + 1):
        model.train()
        order = torch.from_numpy(rng.permutation(n))
        total, count = 0.0, 0
        for start in range(0, n, training.batch_size):
            idx = order[start:start + training.batch_size]
            inputs = tuple(t[idx] for t in train_batch[0])
            targets, valid = train_batch[1][idx], train_batch[2][idx]
            optimizer.zero_grad()
            loss = bc_loss(model, inputs, targets, valid)
            if not torch.isfinite(loss):
                raise TrainingError(f"Non-finite behaviour cloning loss at epoch {epoch}")
            loss.backward()
            optimizer.step()
            total += float(loss) * len(idx)
            count += len(idx)
        history.train_loss.append(total / count)
        history.eval_loss.append(evaluate())
        if history.eval_loss[-1] < history.eval_loss[history.best_epoch]:
            history.best_epoch = epoch
            best_state = {k: v.clone() for k, v in model.state_dict().items()}
        if epoch % 10 == 0 or epoch == training.epochs:
            logger.info(f"VPFormer epoch {epoch}: train {history.train_loss[-1]:.6f}, "
                        f"eval {history.eval_loss[-1]:.6f}")

    model.load_state_dict(best_state)
    model.eval()
    logger.info(f"VPFormer trained on {n} trajectories: best eval {history.best_eval:.6f} "
                f"(initial {history.initial_eval:.6f})")
    return model, history
