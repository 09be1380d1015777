"""
Scene Commands

Commands for generating scenes and rendering their occupancy.
"""

import click


@click.command('scene-gen')
@click.option('--scenes', '-n', default=1, show_default=True, help='Number of scenes')
@click.option('--seed', default=0, show_default=True, help='Scene block seed')
@click.option('--out', '-o', help='Output directory')
@click.pass_context
def scene_gen(ctx, scenes, seed, out):
    """Generate evaluation scenes as JSON documents"""
    ansense = ctx.obj['cli'].build()
    specs = ansense.scene_gen_sync(scenes, seed, out)

    click.echo(f"SUCCESS: Generated {len(specs)} scene(s)")
    for spec in specs:
        click.echo(f"   Scene {spec.seed}: {spec.object_count} objects, "
                   f"{spec.volume:.3f} m^3, opening {spec.opening_face.value}")


@click.command()
@click.option('--scene', 'scene_path', type=click.Path(exists=True, dir_okay=False),
              help='Scene JSON written by scene-gen')
@click.option('--seed', type=int, help='Scene seed to generate instead of reading a file')
@click.option('--out', '-o', help='Output directory')
@click.pass_context
def render(ctx, scene_path, seed, out):
    """Render orthographic views of a scene's ground-truth occupancy"""
    if scene_path and seed is not None:
        raise click.UsageError("Pass either --scene or --seed, not both")
    ansense = ctx.obj['cli'].build()
    written = ansense.render_sync(scene_path, seed, out)

    click.echo("SUCCESS: Rendered views")
    for axis, path in written.items():
        click.echo(f"   {axis}: {path}")
