# app/commands/cgo_commands.py

import click

from app.service.cgo_verify_service import CgoVerifyService
from app.utils.guards import exit_codes


@click.command("cgo-verify")
@click.option("--n", "dimension", type=click.Choice(["2", "3"]), default=None,
              help="Dimension to check; both when omitted.")
@click.option("--samples", default=50, show_default=True, type=click.IntRange(min=1))
@click.option("--tol", default=1e-8, show_default=True, type=click.FloatRange(min=0, min_open=True))
@click.option("--seed", default=None, type=int)
@click.option("--out", "out_path", default=None, type=click.Path(dir_okay=False),
              help="CSV with one row per check.")
@exit_codes
def cgo_verify_cmd(dimension, samples, tol, seed, out_path):
    """Check the closed-form CGO integrals and bounds against adaptive quadrature."""
    dimensions = (int(dimension),) if dimension else (2, 3)
    result = CgoVerifyService(tol=tol, seed=seed).run(dimensions, samples, out=out_path)
    click.echo(f"{result['total']} CGO checks passed")
