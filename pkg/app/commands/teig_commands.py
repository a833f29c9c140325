# app/commands/teig_commands.py

import click

from app.service.scene_service import SceneService
from app.service.transmission_service import TransmissionService
from app.utils.errors import ConfigError
from app.utils.guards import exit_codes

scene_service = SceneService()
transmission_service = TransmissionService()


def _modes(value):
    if value is None:
        return None
    try:
        modes = [int(part) for part in value.split(",") if part.strip()]
    except ValueError as exc:
        raise ConfigError(f"--modes expects comma-separated integers, got '{value}'") from exc
    if not modes or any(m < 0 for m in modes):
        raise ConfigError("--modes needs at least one non-negative mode")
    return modes


@click.command("teig")
@click.argument("itp_path", metavar="ITP", type=click.Path(dir_okay=False))
@click.option("--kmax", type=click.FloatRange(min=0, min_open=True), default=None,
              help="Scan transmission eigenvalues in (0, kmax].")
@click.option("--modes", default=None, help="Comma-separated angular modes, e.g. 0,1,2.")
@click.option("--out", "out_path", required=True, type=click.Path(dir_okay=False))
@exit_codes
def teig_cmd(itp_path, kmax, modes, out_path):
    """Transmission eigenvalues of a ball of constant contrast."""
    result = transmission_service.eigen_table(scene_service.load_json(itp_path), k_max=kmax,
                                              modes=_modes(modes), out=out_path)
    click.echo(f"{result['total']} transmission eigenvalues written to {out_path}")
