"""Masked-attention sequence planner"""

from .attention import causal_mask, masked_attention, MaskedSelfAttention, EncoderBlock
from .model import VPFormer, forward_next_viewpoint, sequence_tensors
from .training import train_bc, bc_loss, trajectory_batch
from .refine import refine_viewpoint

__all__ = [
    "causal_mask", "masked_attention", "MaskedSelfAttention", "EncoderBlock",
    "VPFormer", "forward_next_viewpoint", "sequence_tensors",
    "train_bc", "bc_loss", "trajectory_batch",
    "refine_viewpoint",
]
