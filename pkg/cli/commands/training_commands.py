"""
Training Commands

Commands for score-model data, surrogate training, expert collection and
sequence-model behaviour cloning.
"""

import click

from .options import episode_options, episode_overrides


def _history(history):
    click.echo(f"   Best epoch: {history.best_epoch}")
    click.echo(f"   Eval loss: {history.initial_eval:.6f} -> {history.best_eval:.6f}")


@click.command('gen-data')
@click.option('--scenes', '-n', type=int, help='Training scenes (default training.data_scenes)')
@click.option('--seed', type=int, help='Data seed (default training.seed)')
@click.option('--out', '-o', help='Output directory')
@click.pass_context
def gen_data(ctx, scenes, seed, out):
    """Generate labelled coverage pairs for the surrogate"""
    ansense = ctx.obj['cli'].build()
    corpus = ansense.gen_data_sync(scenes, seed, out)

    click.echo(f"SUCCESS: Generated {len(corpus)} training pairs")
    click.echo(f"   Train/eval: {len(corpus.train)}/{len(corpus.eval)}")
    click.echo(f"   Scenes: {len(corpus.scene_seeds)}")


@click.command('train-score')
@click.argument('data_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--epochs', type=int, help='Training epochs')
@click.option('--lr', type=float, help='Adam learning rate')
@click.option('--seed', type=int, help='Initialisation seed')
@click.option('--out', '-o', help='Output directory')
@click.pass_context
def train_score(ctx, data_path, epochs, lr, seed, out):
    """Train the surrogate score model on a pairs file"""
    ansense = ctx.obj['cli'].build({"training": {"epochs": epochs, "learning_rate": lr, "seed": seed}})
    history = ansense.train_score_sync(data_path, out)

    click.echo("SUCCESS: Surrogate trained")
    _history(history)


@click.command('collect-expert')
@click.option('--scenes', '-n', type=int, help='Expert scenes (default training.expert_scenes)')
@click.option('--seed', type=int, help='Data seed (default training.seed)')
@click.option('--out', '-o', help='Output directory')
@episode_options
@click.pass_context
def collect_expert(ctx, scenes, seed, out, **options):
    """Record bilevel MPC trajectories for behaviour cloning"""
    ansense = ctx.obj['cli'].build(episode_overrides(options))
    dataset = ansense.collect_expert_sync(scenes, seed, out)

    click.echo(f"SUCCESS: Collected {len(dataset)} expert trajectories")
    click.echo(f"   Skipped scenes: {dataset.skipped}")


@click.command('train-vpformer')
@click.argument('data_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--epochs', type=int, help='Training epochs')
@click.option('--lr', type=float, help='Adam learning rate')
@click.option('--seed', type=int, help='Initialisation seed')
@click.option('--out', '-o', help='Output directory')
@click.pass_context
def train_vpformer(ctx, data_path, epochs, lr, seed, out):
    """Behaviour-clone the sequence model on an expert file"""
    ansense = ctx.obj['cli'].build({"training": {"epochs": epochs, "learning_rate": lr, "seed": seed}})
    history = ansense.train_vpformer_sync(data_path, out)

    click.echo("SUCCESS: Sequence model trained")
    _history(history)
