"""
Masked multi-head self-attention
"""

import math
from typing import Optional

import torch
from torch import nn

from ..exceptions import ModelShapeError


def causal_mask(length: int, dtype: torch.dtype = torch.float64) -> torch.Tensor:
    """(L, L) additive mask: 0 where j <= i, -inf where j > i"""
    upper = torch.triu(torch.ones(length, length, dtype=torch.bool), diagonal=1)
    mask = torch.zeros(length, length, dtype=dtype)
    return mask.masked_fill(upper, float("-inf"))


def masked_attention(q: torch.Tensor, k: torch.Tensor, v: torch.Tensor,
                     mask: Optional[torch.Tensor] = None,
                     return_weights: bool = False):
    """
    softmax((Q K^T + M) / sqrt(d_k)) V over the last two dimensions.

    Args:
        q, k: (..., L, d_k)
        v: (..., L, d_v)
        mask: (L, L) additive mask, broadcast over leading dimensions
        return_weights: Also return the row-stochastic attention matrix

    Raises:
        ModelShapeError: On inconsistent shapes
    """
    if q.shape != k.shape:
        raise ModelShapeError(f"Query and key shapes differ: {tuple(q.shape)} vs {tuple(k.shape)}")
    if v.shape[:-1] != k.shape[:-1]:
        raise ModelShapeError(f"Value shape {tuple(v.shape)} does not match key shape {tuple(k.shape)}")
    length = q.shape[-2]
    scores = q @ k.transpose(-2, -1)
    if mask is not None:
        if mask.shape != (length, length):
            raise ModelShapeError(f"Mask shape {tuple(mask.shape)} != ({length}, {length})")
        scores = scores + mask
    weights = torch.softmax(scores / math.sqrt(q.shape[-1]), dim=-1)
    out = weights @ v
    return (out, weights) if return_weights else out


class MaskedSelfAttention(nn.Module):
    """Per-head W^Q, W^K, W^V projections plus an output projection"""

    def __init__(self, width: int, n_heads: int):
        super().__init__()
        if width % n_heads != 0:
            raise ModelShapeError(f"width {width} is not divisible by {n_heads} heads")
        self.n_heads = n_heads
        self.head_dim = width // n_heads
        self.w_q = nn.Linear(width, width, bias=False)
        self.w_k = nn.Linear(width, width, bias=False)
        self.w_v = nn.Linear(width, width, bias=False)
        self.out = nn.Linear(width, width)

    def _split(self, x: torch.Tensor) -> torch.Tensor:
        batch, length, _ = x.shape
        return x.view(batch, length, self.n_heads, self.head_dim).transpose(1, 2)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        batch, length, width = x.shape
        q, k, v = self._split(self.w_q(x)), self._split(self.w_k(x)), self._split(self.w_v(x))
        mask = causal_mask(length, x.dtype).to(x.device)
        heads = masked_attention(q, k, v, mask)
        return self.out(heads.transpose(1, 2).reshape(batch, length, width))


class EncoderBlock(nn.Module):
    """Pre-norm attention and feed-forward sublayers with residuals"""

    def __init__(self, width: int, n_heads: int, ffn_width: int):
        super().__init__()
        self.norm1 = nn.LayerNorm(width)
        self.attn = MaskedSelfAttention(width, n_heads)
        self.norm2 = nn.LayerNorm(width)
        self.ffn = nn.Sequential(nn.Linear(width, ffn_width), nn.GELU(), nn.Linear(ffn_width, width))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = x + self.attn(self.norm1(x))
        return x + self.ffn(self.norm2(x))
