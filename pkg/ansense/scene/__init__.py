"""Scene core: generation, coverage and derived geometry"""

from .coverage import coverage, coverage_gain, ground_truth_grid
from .generation import generate_scene, voxelize_object, scene_from_boxes, scene_dims
from .geometry import SceneGeometry, scene_geometry
from .render import orthographic_views

__all__ = [
    "coverage", "coverage_gain", "ground_truth_grid",
    "generate_scene", "voxelize_object", "scene_from_boxes", "scene_dims",
    "SceneGeometry", "scene_geometry",
    "orthographic_views",
]
