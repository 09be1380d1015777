#!/usr/bin/env python3
"""
Ansense CLI - Active Next-Best-View Sensing Simulator

A command-line interface for scene generation, model training, episodes,
benchmarks and the offline path audit.
"""

import logging
from typing import Any, Dict, Optional

import click

from ansense import Ansense, create_ansense
from .commands import (
    scene_gen, render, gen_data, train_score, collect_expert, train_vpformer,
    run, benchmark, validate_paths
)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"


class AnsenseCLI:
    """Ansense CLI Application"""

    def __init__(self, config_path: Optional[str] = None, log_level: Optional[str] = None,
                 output_dir: Optional[str] = None):
        self.config_path = config_path
        self.log_level = log_level
        self.output_dir = output_dir

    def build(self, overrides: Optional[Dict[str, Any]] = None) -> Ansense:
        """
        Simulator for one command: defaults < config file < flags

        Raises:
            ValueError: On invalid configuration values
        """
        overrides = dict(overrides or {})
        overrides["log_level"] = self.log_level
        overrides["output_dir"] = self.output_dir
        ansense = create_ansense(self.config_path, overrides)
        logging.basicConfig(level=ansense.config.log_level, format=LOG_FORMAT, force=True)
        return ansense


@click.group()
@click.option('--config', '-c', type=click.Path(exists=True, dir_okay=False),
              help='Path to a JSON configuration file')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              help='Logging level')
@click.option('--output-dir', help='Default output directory')
@click.pass_context
def ansense(ctx, config, log_level, output_dir):
    """Ansense - Active Next-Best-View Sensing Simulator"""
    ctx.ensure_object(dict)
    ctx.obj['cli'] = AnsenseCLI(config, log_level, output_dir)


# Register all commands
ansense.add_command(scene_gen)
ansense.add_command(render)
ansense.add_command(gen_data)
ansense.add_command(train_score)
ansense.add_command(collect_expert)
ansense.add_command(train_vpformer)
ansense.add_command(run)
ansense.add_command(benchmark)
ansense.add_command(validate_paths)


if __name__ == '__main__':
    ansense()
