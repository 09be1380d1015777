"""
Ansense CLI Commands

Individual command modules for the CLI interface.
"""

from .scene_commands import scene_gen, render
from .training_commands import gen_data, train_score, collect_expert, train_vpformer
from .run_commands import run, benchmark, validate_paths

# Export all commands
__all__ = [
    'scene_gen', 'render',
    'gen_data', 'train_score', 'collect_expert', 'train_vpformer',
    'run', 'benchmark', 'validate_paths',
]
