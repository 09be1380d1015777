"""Simulated depth sensor"""

from .camera import (
    render_depth, carve_visibility, apply_depth_noise, back_project, world_rays, optical_center
)

__all__ = [
    "render_depth", "carve_visibility", "apply_depth_noise", "back_project", "world_rays",
    "optical_center",
]
