# app/commands/experiment_commands.py

import click

from app.service.experiment_service import SUITES, ExperimentService
from app.service.scene_service import SceneService
from app.utils.guards import exit_codes

scene_service = SceneService()


@click.command("experiment")
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@click.argument("config_path", metavar="CONFIG", type=click.Path(dir_okay=False))
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False),
              help="Directory for the table, summary and calibration files.")
@click.option("--calibration", "calibration_path", default=None, type=click.Path(dir_okay=False),
              help="Freeze constants from an earlier calibration.json instead of calibrating.")
@click.option("--pdf", is_flag=True, help="Also write a PDF summary.")
@exit_codes
def experiment_cmd(suite, config_path, out_dir, calibration_path, pdf):
    """Run an experiment SUITE on CONFIG."""
    result = ExperimentService(calibration_path).run(suite, scene_service.load_json(config_path), out_dir, pdf=pdf)
    click.echo(f"{suite}: passed on {result['total']} rows")
