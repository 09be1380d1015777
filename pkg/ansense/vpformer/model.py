"""
Sequence planner over (coverage, belief features, viewpoint) tokens

Each token embeds its coverage, coarse belief features and viewpoint separately;
the three embeddings are concatenated to the model width, a learned time
embedding is added, and a causally masked encoder stack predicts the next
viewpoint at every position.
"""

import logging
from typing import Sequence, Tuple

import numpy as np
import torch
from torch import nn
from torch.nn import functional as F

from ..core.config import VpformerConfig
from ..core.geometry import canonical_quaternion
from ..exceptions import ModelShapeError
from ..models.camera import Viewpoint
from ..models.learning import TokenSequence
from ..score.surrogate import DTYPE, seeded_init_
from .attention import EncoderBlock

logger = logging.getLogger(__name__)


def _embedding_split(width: int) -> Tuple[int, int, int]:
    """Widths of the coverage, belief and viewpoint embeddings"""
    d_c = width // 4
    d_v = width // 4
    return d_c, width - d_c - d_v, d_v


class VPFormer(nn.Module):
    """Causal encoder mapping token prefixes to next-viewpoint predictions"""

    def __init__(self, config: VpformerConfig, feature_size: int, seed: int = 0):
        super().__init__()
        self.config = config
        self.feature_size = feature_size
        d_c, d_s, d_v = _embedding_split(config.width)
        self.embed_c = nn.Linear(1, d_c)
        self.embed_s = nn.Linear(feature_size, d_s)
        self.embed_v = nn.Linear(7, d_v)
        self.embed_time = nn.Embedding(config.max_len, config.width)
        self.blocks = nn.ModuleList(
            EncoderBlock(config.width, config.n_heads, config.ffn_width) for _ in range(config.n_layers))
        self.norm = nn.LayerNorm(config.width)
        self.head = nn.Linear(config.width, 7)
        self.to(DTYPE)
        seeded_init_(self, seed)
        with torch.no_grad():
            self.embed_time.weight.copy_(torch.from_numpy(
                np.random.default_rng(seed).normal(0.0, 0.02, size=tuple(self.embed_time.weight.shape))))

    def forward(self, coverage: torch.Tensor, features: torch.Tensor, views: torch.Tensor,
                lo: torch.Tensor, hi: torch.Tensor) -> torch.Tensor:
        """
        Args:
            coverage: (B, L) cumulative coverage tokens
            features: (B, L, F) coarse belief features
            views: (B, L, 7) viewpoint tokens in world units
            lo, hi: (B, 3) position box of the outputs

        Returns:
            (B, L, 7) predicted next viewpoints; positions inside [lo, hi], unit quaternions
        """
        batch, length = coverage.shape
        if length > self.config.max_len:
            raise ModelShapeError(f"Sequence length {length} exceeds max_len {self.config.max_len}")
        if features.shape != (batch, length, self.feature_size) or views.shape != (batch, length, 7):
            raise ModelShapeError(f"Token shapes {tuple(features.shape)}, {tuple(views.shape)} do not match "
                                  f"({batch}, {length}, {self.feature_size}/7)")
        span = (hi - lo).unsqueeze(1)
        rel = torch.cat([2.0 * (views[..., :3] - lo.unsqueeze(1)) / span - 1.0, views[..., 3:]], dim=-1)
        z = torch.cat([self.embed_c(coverage.unsqueeze(-1)), self.embed_s(features), self.embed_v(rel)],
                      dim=-1)
        z = z + self.embed_time(torch.arange(length, device=z.device)).unsqueeze(0)
        for block in self.blocks:
            z = block(z)
        raw = self.head(self.norm(z))
        position = lo.unsqueeze(1) + span * (torch.tanh(raw[..., :3]) + 1.0) / 2.0
        quaternion = F.normalize(raw[..., 3:], dim=-1, eps=1e-12)
        return torch.cat([position, quaternion], dim=-1)


def sequence_tensors(sequences: Sequence[TokenSequence], feature_size: int, length: int
                     ) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor,
                                torch.Tensor]:
    """
    Right-padded batch tensors (coverage, features, views, lo, hi, valid) of
    sequences. Padded slots hold neutral tokens; causal masking keeps them out of
    every valid position.
    """
    batch = len(sequences)
    coverage = np.zeros((batch, length))
    features = np.zeros((batch, length, feature_size))
    views = np.zeros((batch, length, 7))
    views[..., 3] = 1.0
    valid = np.zeros((batch, length), dtype=bool)
    lo = np.zeros((batch, 3))
    hi = np.ones((batch, 3))
    for b, seq in enumerate(sequences):
        lo[b], hi[b] = seq.bounds
        for i, step in enumerate(seq.steps[:length]):
            if step.features.shape != (feature_size,):
                raise ModelShapeError(f"Token features have shape {step.features.shape}, expected ({feature_size},)")
            coverage[b, i] = step.coverage
            features[b, i] = step.features
            views[b, i, :3] = step.viewpoint.position
            views[b, i, 3:] = canonical_quaternion(step.viewpoint.orientation_array)
            valid[b, i] = True
    tensors = tuple(torch.from_numpy(a).to(DTYPE) for a in (coverage, features, views, lo, hi))
    return tensors + (torch.from_numpy(valid),)


def forward_next_viewpoint(model: VPFormer, seq: TokenSequence) -> Viewpoint:
    """Deterministic next-viewpoint prediction after the last token of ``seq``"""
    if len(seq) > model.config.max_len:
        raise ModelShapeError(f"Sequence length {len(seq)} exceeds max_len {model.config.max_len}")
    tensors = sequence_tensors([seq], model.feature_size, len(seq))
    model.eval()
    with torch.no_grad():
        out = model(*tensors[:5])[0, len(seq) - 1].numpy()
    return Viewpoint.from_vector(out)
