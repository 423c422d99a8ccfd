"""Options, config loading and exit-code handling shared by all commands."""

from contextlib import contextmanager
from pathlib import Path
from typing import Any, Optional

import click
from rich.console import Console
from rich.markup import escape

from radiant_disk.config import RunConfig, load_run_config
from radiant_disk.exceptions import ConfigError, RadiantDiskError
from radiant_disk.models import validate_params
from radiant_disk.utils import build_metadata

console = Console()

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2


def run_options(func):
    """Options every subcommand accepts: config file, output and overrides."""
    options = [
        click.option(
            "--config",
            "config_path",
            type=click.Path(path_type=Path, dir_okay=False),
            envvar="RADIANT_DISK_CONFIG",
            help="Run configuration JSON (or set RADIANT_DISK_CONFIG env var)",
        ),
        click.option(
            "--out",
            "out_dir",
            type=click.Path(path_type=Path, file_okay=False),
            envvar="RADIANT_DISK_OUT",
            help="Output directory (overrides output.directory)",
        ),
        click.option(
            "--format",
            "formats",
            help="Comma-separated output formats, subset of csv,json",
        ),
        click.option("--q0", type=float, help="Source density Q0 [W/m^3]"),
        click.option("--n-cells", type=int, help="Radial cells of the reduced solver"),
        click.option("--tol", type=float, help="Newton residual tolerance [K/m^2]"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def collect_overrides(**values: Any) -> list[tuple[str, Any]]:
    """Turn CLI option values into ordered (name, value) overrides, skipping unset ones."""
    overrides = []
    for name, value in values.items():
        if value is None:
            continue
        if name == "formats":
            value = [part.strip() for part in value.split(",") if part.strip()]
        overrides.append((name, value))
    return overrides


def load_for_command(config_path: Optional[Path], overrides: list[tuple[str, Any]]) -> RunConfig:
    """Load the run configuration and re-check the disk parameters.

    Raises:
        ConfigError: If no config was given or it is invalid
    """
    if config_path is None:
        raise ConfigError("no configuration given; use --config or set RADIANT_DISK_CONFIG")
    config = load_run_config(config_path, overrides)
    validate_params(config.disk)
    return config


def metadata_for(command: str, config: RunConfig, notes: Optional[list[str]] = None) -> dict[str, Any]:
    return build_metadata(command, config.effective(), notes)


@contextmanager
def exit_codes(ctx: click.Context):
    """Map package errors onto exit codes 1 (config) and 2 (numerical)."""
    try:
        yield
    except ValueError as e:
        console.print(f"[red]Error: {escape(str(e))}[/red]")
        ctx.exit(EXIT_CONFIG)
    except RadiantDiskError as e:
        console.print(f"[red]Numerical failure: {escape(str(e))}[/red]")
        ctx.exit(EXIT_NUMERICAL)
