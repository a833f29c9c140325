# app/commands/medium_commands.py

import click
import numpy as np

from app.models.grid import cell_grid
from app.models.scattering_medium import scattered_far_field, series_far_field, solve_ls, solve_series
from app.service.scene_service import SceneService
from app.utils.export import write_field_csv
from app.utils.guards import exit_codes
from app.utils.logger import logger

scene_service = SceneService()


@click.command("medium")
@click.argument("scene_path", metavar="SCENE", type=click.Path(dir_okay=False))
@click.option("--fields", "fields_path", required=True, type=click.Path(dir_okay=False),
              help="CSV of the total field on the solver grid.")
@click.option("--farfield", "farfield_path", required=True, type=click.Path(dir_okay=False),
              help="CSV of the scattered far-field pattern.")
@click.option("--dirs", default=64, show_default=True, type=click.IntRange(min=8))
@click.option("--tol", default=1e-8, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--max-iter", default=200, show_default=True, type=click.IntRange(min=1))
@click.option("--solver", default="grid", show_default=True, type=click.Choice(["grid", "series"]),
              help="grid: Lippmann-Schwinger on a cell grid; series: exact modes for one constant ball.")
@click.option("--json", "json_path", default=None, type=click.Path(dir_okay=False))
@exit_codes
def medium_cmd(scene_path, fields_path, farfield_path, dirs, tol, max_iter, solver, json_path):
    """Scatter the incident wave of SCENE off its medium and write the total field and far field."""
    scene, data = scene_service.medium_scene(scene_service.load_json(scene_path))
    if solver == "grid":
        solution = solve_ls(scene, tol=tol, max_iter=max_iter)
        write_field_csv(fields_path, solution.u.points, solution.u.values)
        pattern = scattered_far_field(scene, solution, n_dirs=dirs)
        logger.info(f"Medium solve: {solution.method}, {solution.iterations} iterations")
    else:
        scatterer, modal = solve_series(scene)
        grid = data["fields_output"]
        spacing = grid["spacing"] or scene.spacing
        first, shape = cell_grid(scene.domain, spacing, grid["padding"])
        axes = [c + spacing * np.arange(m) for c, m in zip(first, shape)]
        points = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, scene.n)
        write_field_csv(fields_path, points, scatterer.total_field(points, modal))
        pattern = series_far_field(scene, n_dirs=dirs)
    pattern.to_csv(farfield_path)
    if json_path:
        pattern.to_json(json_path)
    click.echo(f"scattered far-field sup {pattern.sup():.6e}")
