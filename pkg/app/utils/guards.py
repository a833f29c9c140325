import json
from functools import wraps

import click
from marshmallow import ValidationError

from app.utils.errors import ConfigError, DomainError, NumericalFailure, SuiteAssertionError
from app.utils.logger import logger

EXIT_SUITE = 1
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def exit_codes(fn):
    """Run a command callback and turn the package's errors into process exit codes."""
    @wraps(fn)
    def decorator(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except SuiteAssertionError as exc:
            logger.error(f"Suite assertion failed: {exc}")
            click.echo(f"FAIL: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_SUITE)
        except ValidationError as exc:
            logger.warning(f"Invalid input: {exc.messages}")
            click.echo(f"invalid input: {json.dumps(exc.messages, sort_keys=True)}", err=True)
            raise click.exceptions.Exit(EXIT_CONFIG)
        except (ConfigError, DomainError, json.JSONDecodeError, FileNotFoundError) as exc:
            logger.warning(f"Configuration error: {exc}")
            click.echo(f"configuration error: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_CONFIG)
        except NumericalFailure as exc:
            logger.error(f"Numerical failure: {exc}")
            click.echo(f"numerical failure: {exc}", err=True)
            raise click.exceptions.Exit(EXIT_NUMERICAL)
    return decorator
