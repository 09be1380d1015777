"""
Shared Command Options

Episode flags mirror EpisodeConfig; every flag defaults to None so that
config-file values survive unless the flag is given.
"""

from typing import Any, Dict

import click

from ansense.core.config import SCORE_MODEL_NAMES

_EPISODE_OPTIONS = [
    click.option('--score-model', type=click.Choice(SCORE_MODEL_NAMES), help='Viewpoint score model'),
    click.option('--c-max', type=float, help='Coverage threshold ending an episode'),
    click.option('--t-max', type=int, help='Viewpoint cap per episode'),
    click.option('--completion/--no-completion', default=None, help='Shape completion during registration'),
    click.option('--refinement/--no-refinement', default=None, help='Score-based refinement of model proposals'),
    click.option('--sigma-pos', type=float, help='Execution noise on the final position (m)'),
    click.option('--sigma-ang', type=float, help='Execution noise on the final orientation (rad)'),
    click.option('--batch-size', type=int, help='Candidates walked per step'),
    click.option('--guided-batch', type=int, help='Uniform samples ranked by random_guided'),
    click.option('--max-discards', type=int, help='Discarded steps allowed per episode (default t-max)'),
    click.option('--record-snapshots/--no-record-snapshots', default=None,
                 help='Keep per-step observations, grids and collision snapshots'),
    click.option('--score-params', type=click.Path(exists=True, dir_okay=False),
                 help='Surrogate parameter file'),
    click.option('--vpformer-params', type=click.Path(exists=True, dir_okay=False),
                 help='Sequence model parameter file'),
    click.option('--with-timing/--without-timing', default=None, help='Add planning time to metrics.csv'),
]


def episode_options(func):
    """Attach the episode flags to a command"""
    for option in reversed(_EPISODE_OPTIONS):
        func = option(func)
    return func


def episode_overrides(options: Dict[str, Any], policy=None, seed=None) -> Dict[str, Dict[str, Any]]:
    """Config overrides from parsed episode flags"""
    return {
        "episode": {
            "policy": policy,
            "score_model": options.get("score_model"),
            "c_max": options.get("c_max"),
            "t_max": options.get("t_max"),
            "completion_on": options.get("completion"),
            "refinement_on": options.get("refinement"),
            "noise": {"sigma_pos": options.get("sigma_pos"), "sigma_ang": options.get("sigma_ang")},
            "seed": seed,
            "batch_size": options.get("batch_size"),
            "guided_batch": options.get("guided_batch"),
            "max_discards": options.get("max_discards"),
            "record_snapshots": options.get("record_snapshots"),
        },
        "score": {"params_path": options.get("score_params")},
        "vpformer": {"params_path": options.get("vpformer_params")},
        "benchmark": {"with_timing": options.get("with_timing")},
    }
