# app/commands/source_commands.py

import click

from app.models.scattering_source import far_field, solve_field_grid
from app.service.scene_service import SceneService
from app.utils.export import write_field_csv
from app.utils.guards import exit_codes
from app.utils.logger import logger

scene_service = SceneService()


@click.command("source")
@click.argument("scene_path", metavar="SCENE", type=click.Path(dir_okay=False))
@click.option("--fields", "fields_path", required=True, type=click.Path(dir_okay=False),
              help="CSV of the field on a cell grid covering the domain.")
@click.option("--farfield", "farfield_path", required=True, type=click.Path(dir_okay=False),
              help="CSV of the far-field pattern.")
@click.option("--dirs", default=64, show_default=True, type=click.IntRange(min=8),
              help="Number of far-field directions (polar nodes in 3D).")
@click.option("--json", "json_path", default=None, type=click.Path(dir_okay=False),
              help="Also write the far field as JSON.")
@exit_codes
def source_cmd(scene_path, fields_path, farfield_path, dirs, json_path):
    """Radiate the source described by SCENE and write its field and far field."""
    scene, data = scene_service.source_scene(scene_service.load_json(scene_path))
    grid = data["fields_output"]
    u, _ = solve_field_grid(scene, grid["spacing"] or scene.spacing, grid["padding"])
    write_field_csv(fields_path, u.points, u.values)
    pattern = far_field(scene, n_dirs=dirs)
    pattern.to_csv(farfield_path)
    if json_path:
        pattern.to_json(json_path)
    logger.info(f"Source far-field sup {pattern.sup():.6e}")
    click.echo(f"far-field sup {pattern.sup():.6e}")
