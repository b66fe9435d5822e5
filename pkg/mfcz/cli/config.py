"""CLI commands to manage the mfcz runtime configuration"""

import logging
import sys
from pathlib import Path

import click

from mfcz.common import (
    DEFAULT_MULTI_START_COUNT,
    DEFAULT_POWER_METHOD_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_SUMSET_CAP,
)
from mfcz.mfcz_rc import MfczRuntimeConfig


logger = logging.getLogger(__name__)


@click.group()
def config():
    """Config commands"""


@click.command()
@click.option(
    "--timings/--no-timings",
    default=False,
    is_flag=True,
    show_default=True,
    help="Enable tracking of function timings.",
)
@click.option(
    "--console-level",
    default="info",
    show_default=True,
    help="Console log level.",
)
@click.option(
    "--file-level",
    default="info",
    show_default=True,
    help="File log level.",
)
@click.option(
    "-o",
    "--output-dir",
    type=Path,
    default="mfcz-output",
    show_default=True,
    help="Parent directory for experiment output.",
)
@click.option(
    "-s",
    "--seed",
    type=int,
    default=DEFAULT_SEED,
    show_default=True,
    help="Default experiment seed.",
)
@click.option(
    "--sumset-cap",
    type=int,
    default=DEFAULT_SUMSET_CAP,
    show_default=True,
    help="Maximum sumset cardinality.",
)
@click.option(
    "--multi-start-count",
    type=int,
    default=DEFAULT_MULTI_START_COUNT,
    show_default=True,
    help="Starts of the span constant optimization for p < 2.",
)
@click.option(
    "--power-method-restarts",
    type=int,
    default=DEFAULT_POWER_METHOD_RESTARTS,
    show_default=True,
    help="Random restarts of the p-norm power method.",
)
def create(
    timings,
    console_level,
    file_level,
    output_dir,
    seed,
    sumset_cap,
    multi_start_count,
    power_method_restarts,
):
    """Create a local mfcz runtime configuration file."""
    mfcz_config = MfczRuntimeConfig(
        timings=timings,
        console_level=console_level,
        file_level=file_level,
        output_dir=output_dir,
        default_seed=seed,
        sumset_cap=sumset_cap,
        multi_start_count=multi_start_count,
        power_method_restarts=power_method_restarts,
    )
    mfcz_config.dump()


@click.command()
def show():
    """Show the active mfcz runtime configuration."""
    path = MfczRuntimeConfig.path()
    source = path if path.exists() else "defaults"
    print(f"# {source}", file=sys.stderr)
    print(MfczRuntimeConfig.load().json(indent=2))


config.add_command(create)
config.add_command(show)
