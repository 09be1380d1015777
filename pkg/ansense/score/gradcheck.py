"""
Finite-difference check of autograd gradients, per parameter tensor
"""

from dataclasses import dataclass
from typing import Callable, List

import numpy as np
import torch
from torch import nn

from ..core.utils import derive_rng


@dataclass
class GradientCheck:
    """Analytic vs central-difference derivative of one parameter entry"""
    parameter: str
    index: tuple
    analytic: float
    numeric: float

    @property
    def relative_error(self) -> float:
        scale = max(abs(self.analytic), abs(self.numeric), 1e-8)
        return abs(self.analytic - self.numeric) / scale


def gradient_check(module: nn.Module, loss_fn: Callable[[], torch.Tensor], per_parameter: int = 10,
                   seed: int = 0, eps: float = 1e-6) -> List[GradientCheck]:
    """
    Compare autograd gradients against central differences.

    Args:
        module: float64 module whose parameters are checked
        loss_fn: Closure computing a scalar loss from the module's current parameters
        per_parameter: Entries checked per parameter tensor (capped at its size)
        seed: Entry selection seed
        eps: Finite-difference step

    Returns:
        One GradientCheck per checked entry
    """
    module.zero_grad()
    loss_fn().backward()
    rng = derive_rng(seed, 99)
    checks = []
    for name, param in module.named_parameters():
        analytic = param.grad.detach().clone()
        picks = rng.choice(param.numel(), size=min(per_parameter, param.numel()), replace=False)
        flat = param.data.view(-1)
        for pick in picks:
            original = float(flat[pick])
            with torch.no_grad():
                flat[pick] = original + eps
                plus = float(loss_fn())
                flat[pick] = original - eps
                minus = float(loss_fn())
                flat[pick] = original
            index = tuple(int(i) for i in np.unravel_index(int(pick), tuple(param.shape)))
            checks.append(GradientCheck(name, index, float(analytic.view(-1)[pick]),
                                        (plus - minus) / (2.0 * eps)))
    module.zero_grad()
    return checks
