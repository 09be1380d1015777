"""
Ansense Simulator Exceptions

Exception classes for the active next-best-view sensing simulator.
"""


class AnsenseError(Exception):
    """Base exception for the Ansense simulator"""
    pass


class SceneGenerationError(AnsenseError):
    """Scene generation or object placement failure"""
    pass


class GridMismatchError(AnsenseError):
    """Two belief grids (or a grid and an observation) disagree on dimensions"""
    pass


class MonotonicityError(AnsenseError):
    """A belief update would turn an observed voxel back to UNKNOWN"""
    pass


class SensorError(AnsenseError):
    """Depth rendering failure, e.g. a camera placed inside solid geometry"""
    pass


class RegistrationError(AnsenseError):
    """Scene registration failure (segmentation, merging, normalisation, completion)"""
    pass


class ScoreModelError(AnsenseError):
    """Score model misuse, e.g. rollout labelling without oracle access"""
    pass


class TrainingError(AnsenseError):
    """Model training failure (empty dataset, non-finite loss)"""
    pass


class ModelShapeError(AnsenseError):
    """Inconsistent tensor or parameter shapes"""
    pass


class InfeasibleViewpointError(AnsenseError):
    """A viewpoint violates the feasibility predicate"""
    pass


class NoFeasibleViewpointError(AnsenseError):
    """Sampling produced zero feasible viewpoints within its attempt budget"""
    pass


class PathPlanningError(AnsenseError):
    """Path planning failure (infeasible endpoint or exhausted sample budget)"""
    pass


class EpisodeError(AnsenseError):
    """Episode or benchmark configuration failure"""
    pass
