"""Shared fixtures: tiny hand-built cabinets and a scaled-down configuration"""

import pytest

from ansense.core.config import (
    AnsenseConfig, BenchmarkConfig, DomainRandomizationConfig, EpisodeConfig, MotionConfig,
    MpcParams, ScoreConfig, SensorConfig, TrainingConfig, VpformerConfig
)
from ansense.models.grid import BeliefGrid, GridDims
from ansense.models.registration import BeliefState
from ansense.motion.context import motion_context
from ansense.scene.generation import scene_from_boxes
from ansense.scene.geometry import scene_geometry


@pytest.fixture
def tiny_dims():
    return GridDims(8, 8, 8, 0.025)


@pytest.fixture
def box_scene(tiny_dims):
    """One 3x4x4 box in an 8^3 cabinet opening towards -x"""
    return scene_from_boxes(tiny_dims, [((3, 2, 0), (5, 5, 3))], seed=7)


@pytest.fixture
def two_box_scene(tiny_dims):
    return scene_from_boxes(tiny_dims, [((2, 1, 0), (3, 2, 2)), ((5, 5, 0), (6, 6, 4))], seed=11)


@pytest.fixture
def empty_scene(tiny_dims):
    return scene_from_boxes(tiny_dims, [], seed=3)


@pytest.fixture
def small_sensor():
    return SensorConfig(width=32, height=18)


@pytest.fixture
def small_config(small_sensor):
    """Scaled-down schedule, budgets and networks for quick episodes"""
    return AnsenseConfig(
        scene=DomainRandomizationConfig(
            extent_x=(0.15, 0.2), extent_y=(0.2, 0.25), extent_z=(0.15, 0.2),
            base_offset_x=(-0.3, -0.15), base_offset_y=(-0.03, 0.03),
            object_count=(1, 2), object_size=(0.03, 0.06),
        ),
        sensor=small_sensor,
        motion=MotionConfig(rrt_budget=500),
        mpc=MpcParams.small(n_mpc=20, stage1_samples=20),
        score=ScoreConfig(coarse_shape=(2, 2, 2), grid_hidden=(16, 8), view_hidden=8),
        training=TrainingConfig(epochs=5, batch_size=8, data_scenes=2, sequences_per_scene=1,
                                sequence_length=2, expert_scenes=2),
        vpformer=VpformerConfig(width=32, n_heads=4, n_layers=1, ffn_width=64, max_len=4,
                                refine_samples=10),
        episode=EpisodeConfig(t_max=3, batch_size=10, guided_batch=20),
        benchmark=BenchmarkConfig(n_scenes=2),
    )


@pytest.fixture
def box_geometry(box_scene, small_config):
    return scene_geometry(box_scene, small_config.motion)


@pytest.fixture
def unknown_belief(tiny_dims):
    return BeliefState(BeliefGrid.unknown(tiny_dims))


@pytest.fixture
def box_context(unknown_belief, box_geometry, small_config):
    return motion_context(unknown_belief, box_geometry, small_config.motion)
