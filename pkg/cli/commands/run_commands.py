"""
Run Commands

Commands for episodes, benchmarks, ablations and the offline path audit.
"""

import click

from ansense.core.config import POLICY_NAMES
from .options import episode_options, episode_overrides


def _table(table):
    click.echo(f"{'policy':<14} {'viewpoints':>14} {'success':>8} {'cspace':>14} {'workspace':>14} "
               f"{'chamfer':>16}")
    for row in table.rows:
        chamfer = f"{row.chamfer[0]:>7.4f} ± {row.chamfer[1]:<6.4f}" if row.chamfer else f"{'-':>16}"
        click.echo(f"{row.policy:<14} {row.viewpoints[0]:>7.2f} ± {row.viewpoints[1]:<4.2f} "
                   f"{row.success_rate:>8.2%} {row.cspace[0]:>7.3f} ± {row.cspace[1]:<4.2f} "
                   f"{row.workspace[0]:>7.3f} ± {row.workspace[1]:<4.2f} {chamfer}")


@click.command()
@click.option('--policy', '-p', type=click.Choice(POLICY_NAMES), help='Viewpoint policy')
@click.option('--scenes', '-n', default=1, show_default=True, help='Evaluation scenes')
@click.option('--seed', type=int, help='Scene block and episode seed (default episode.seed)')
@click.option('--out', '-o', help='Output directory')
@episode_options
@click.pass_context
def run(ctx, policy, scenes, seed, out, **options):
    """Run one policy on evaluation scenes and export every artifact"""
    if options.get("record_snapshots") is None:
        options["record_snapshots"] = True
    ansense = ctx.obj['cli'].build(episode_overrides(options, policy, seed))
    result = ansense.run_sync(scenes, ansense.config.episode.seed, out)

    for log in result.logs:
        click.echo(f"EPISODE: scene {log.scene_seed}: {log.status.value}, "
                   f"{log.num_viewpoints} viewpoints, coverage {log.final_coverage:.3f}")
    _table(result.table)


@click.command()
@click.option('--policy', '-p', 'policies', multiple=True, type=click.Choice(POLICY_NAMES),
              help='Policies to compare (repeatable)')
@click.option('--scenes', '-n', type=int, help='Evaluation scenes (default benchmark.n_scenes)')
@click.option('--seed', type=int, help='Scene block and episode seed (default episode.seed)')
@click.option('--ablation', type=click.Choice(['completion', 'refinement']),
              help='Paired on/off run of one episode flag')
@click.option('--out', '-o', help='Output directory')
@episode_options
@click.pass_context
def benchmark(ctx, policies, scenes, seed, ablation, out, **options):
    """Compare policies on the same unseen scenes"""
    ansense = ctx.obj['cli'].build(episode_overrides(options, seed=seed))
    results = ansense.benchmark_sync(scenes, ansense.config.episode.seed, list(policies) or None, ablation, out)

    for label, result in results.items():
        click.echo(f"RESULTS: {label}")
        click.echo("=" * 70)
        _table(result.table)
        click.echo()


@click.command('validate-paths')
@click.argument('run_dir', type=click.Path(exists=True, file_okay=False))
@click.pass_context
def validate_paths(ctx, run_dir):
    """Re-check every exported path against its collision snapshot"""
    ansense = ctx.obj['cli'].build()
    report = ansense.validate_paths_sync(run_dir)

    click.echo(f"AUDIT: {report.checked} paths checked")
    if report.missing:
        click.echo(f"   Without snapshots: {len(report.missing)}")
    if not report.ok:
        for policy, scene, step, segment in report.failures:
            click.echo(f"   FAIL: {policy} scene {scene} step {step} segment {segment}", err=True)
        ctx.exit(2)
    click.echo("SUCCESS: Every audited path is collision-free")
