# app/__init__.py

import click

from app.commands.cgo_commands import cgo_verify_cmd
from app.commands.experiment_commands import experiment_cmd
from app.commands.medium_commands import medium_cmd
from app.commands.source_commands import source_cmd
from app.commands.teig_commands import teig_cmd
from app.config import Config, TestingConfig
from app.utils.logger import logger


def create_app(testing=False):
    active = TestingConfig if testing else Config
    if testing:
        Config.THREADS = TestingConfig.THREADS

    @click.group(help="Forward and inverse scattering lab for the Helmholtz equation.")
    @click.pass_context
    def cli(ctx):
        ctx.obj = active

    cli.add_command(source_cmd)
    cli.add_command(medium_cmd)
    cli.add_command(teig_cmd)
    cli.add_command(cgo_verify_cmd)
    cli.add_command(experiment_cmd)
    logger.info("InvisiScat initialized.")
    return cli
