"""Scene registration: segmentation, instance merging, completion"""

from .segmentation import segment_oracle
from .merging import merge_instances, merge_with_assignments, min_pair_distance
from .completion import (
    normalize_partial, denormalize, complete_instance, chamfer, evaluate_completion
)
from .pipeline import integrate_observation, integrate_belief, complete_all

__all__ = [
    "segment_oracle",
    "merge_instances", "merge_with_assignments", "min_pair_distance",
    "normalize_partial", "denormalize", "complete_instance", "chamfer", "evaluate_completion",
    "integrate_observation", "integrate_belief", "complete_all",
]
