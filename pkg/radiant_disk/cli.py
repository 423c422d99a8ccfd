"""CLI interface for Radiant Disk."""

import logging
import sys

import click
from rich.console import Console
from rich.logging import RichHandler

from radiant_disk import __version__
from radiant_disk.cli_common import (
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    collect_overrides,
    console,
    exit_codes,
    load_for_command,
    metadata_for,
    run_options,
)
from radiant_disk.cli_studies import PROFILE_HEADER, compare, convergence, sweep, validate
from radiant_disk.config import load_config
from radiant_disk.solver1d import solve_reduced
from radiant_disk.stats import compute_stats
from radiant_disk.utils import format_temperature, write_csv, write_json

# Load .env file at module import
load_config()


@click.group()
@click.version_option(__version__, prog_name="radiant-disk")
@click.option("-v", "--verbose", is_flag=True, help="Log solver iterations")
def cli(verbose: bool):
    """Radiant Disk - heated thin disk with surface radiation."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(message)s",
        handlers=[RichHandler(console=Console(stderr=True), show_path=False)],
        force=True,
    )


# Register study commands
cli.add_command(validate)
cli.add_command(sweep)
cli.add_command(convergence)
cli.add_command(compare)


@cli.command()
@run_options
@click.pass_context
def solve(ctx, config_path, out_dir, formats, q0, n_cells, tol):
    """Solve the reduced equation and write profile.csv and stats.json."""
    with exit_codes(ctx):
        config = load_for_command(
            config_path,
            collect_overrides(q0=q0, n_cells=n_cells, tol=tol, out=out_dir, formats=formats),
        )
        params = config.disk

        with console.status("[bold green]Solving reduced equation..."):
            field, report = solve_reduced(
                params, config.solver.n_cells, config.solver.tol, config.solver.max_iter
            )

        if not report.converged:
            console.print(
                f"[red]Solve did not converge after {report.iterations} iterations "
                f"(residual {report.residual_norm:.3e} > tol {report.tol:.3e})[/red]"
            )
            ctx.exit(EXIT_NUMERICAL)

        stats = compute_stats(field, params)
        metadata = metadata_for("solve", config)
        directory = config.output.directory

        if "csv" in config.output.formats:
            rows = zip(field.grid.centers.tolist(), field.values.tolist())
            write_csv(directory / "profile.csv", PROFILE_HEADER, rows, metadata)
        if "json" in config.output.formats:
            write_json(directory / "stats.json", stats.model_dump(), metadata)

        console.print(
            f"t_iso={format_temperature(stats.t_iso)}  "
            f"t_bar={format_temperature(stats.t_bar)}  "
            f"variance={stats.variance:.6g} K^2  "
            f"identity_residual={stats.identity_residual:.3e}"
        )


def main():
    """Console-script entry point; usage errors exit with status 1."""
    try:
        code = cli.main(standalone_mode=False)
    except click.exceptions.Abort:
        console.print("[yellow]Aborted.[/yellow]")
        sys.exit(EXIT_CONFIG)
    except click.ClickException as e:
        e.show()
        sys.exit(EXIT_CONFIG)
    sys.exit(code or 0)


if __name__ == "__main__":
    main()
