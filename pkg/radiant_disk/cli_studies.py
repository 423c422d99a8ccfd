"""CLI commands for the validation, sweep, convergence and comparison studies."""

import click
from rich.table import Table

from radiant_disk.cli_common import (
    EXIT_NUMERICAL,
    collect_overrides,
    console,
    exit_codes,
    load_for_command,
    metadata_for,
    run_options,
)
from radiant_disk.experiments import (
    DEFAULT_SWEEP_NOTE,
    compare_mean_to_isothermal,
    convergence_study,
    run_sweep,
    validate_thin_plate,
)
from radiant_disk.utils import format_temperature, write_csv, write_json

PEAK_DEVIATION_LIMIT = 0.01
ORDER_RANGE = (1.8, 2.2)

SWEEP_HEADER = [
    "q0_W_per_m3",
    "dT_max_K",
    "variance_K2",
    "normalized_variance",
    "t_iso_K",
    "t_bar_num_K",
    "t_bar_anal_K",
    "abs_error_K",
    "converged",
]
FIELD2D_HEADER = ["r_m", "z_m", "T_K"]
PROFILE_HEADER = ["r_m", "T_K"]


@click.command()
@run_options
@click.option("--nr", type=int, help="Radial cells of the (r, z) solver")
@click.option("--nz", type=int, help="Axial layers of the (r, z) solver")
@click.pass_context
def validate(ctx, config_path, out_dir, formats, q0, n_cells, tol, nr, nz):
    """Check the thin-plate reduction against the axisymmetric solve."""
    with exit_codes(ctx):
        config = load_for_command(
            config_path,
            collect_overrides(
                q0=q0, n_cells=n_cells, tol=tol, nr=nr, nz=nz, out=out_dir, formats=formats
            ),
        )

        with console.status("[bold green]Running reduced and (r, z) solves..."):
            result, field_2d = validate_thin_plate(
                config.disk,
                n_cells=config.solver.n_cells,
                nr=config.solver2d.nr,
                nz=config.solver2d.nz,
                tol=config.solver.tol,
                max_iter=config.solver.max_iter,
            )

        metadata = metadata_for(
            "validate", config, ["peak deviation denominator: peak rise T1D(0) - Ta"]
        )
        if "json" in config.output.formats:
            write_json(config.output.directory / "validation.json", result.model_dump(), metadata)
        if "csv" in config.output.formats:
            mesh = field_2d.mesh
            rows = (
                (r, z, float(field_2d.values[i, j]))
                for i, r in enumerate(mesh.radial.centers.tolist())
                for j, z in enumerate(mesh.z_centers.tolist())
            )
            write_csv(config.output.directory / "field2d.csv", FIELD2D_HEADER, rows, metadata)

        table = Table(title="Thin-plate validation", show_header=False)
        table.add_column("Metric", style="cyan", width=32)
        table.add_column("Value", style="magenta")
        table.add_row("Reduced T(0)", format_temperature(result.peak_1d))
        table.add_row("Mid-plane T(0)", format_temperature(result.peak_2d_midplane))
        table.add_row("Peak-rise deviation", f"{result.peak_rise_deviation:.4%}")
        table.add_row("Peak deviation (absolute T)", f"{result.peak_relative_deviation:.4%}")
        table.add_row("Profile max deviation", f"{result.profile_max_deviation:.4g} K")
        table.add_row("Top-bottom variation", f"{result.z_variation:.4g} K")
        console.print(table)

        if result.peak_rise_deviation >= PEAK_DEVIATION_LIMIT:
            console.print(
                f"[red]Peak-rise deviation {result.peak_rise_deviation:.3%} "
                f"is not below {PEAK_DEVIATION_LIMIT:.0%}[/red]"
            )
            ctx.exit(EXIT_NUMERICAL)


@click.command()
@run_options
@click.option("--workers", type=int, help="Concurrent sweep points")
@click.pass_context
def sweep(ctx, config_path, out_dir, formats, q0, n_cells, tol, workers):
    """Sweep the source density and compare mean temperature with the variance relation."""
    with exit_codes(ctx):
        config = load_for_command(
            config_path,
            collect_overrides(
                q0=q0, n_cells=n_cells, tol=tol, workers=workers, out=out_dir, formats=formats
            ),
        )
        spec = config.sweep_spec()

        with console.status(f"[bold green]Solving {len(spec.q0_values())} sweep points..."):
            rows = run_sweep(spec)

        notes = [DEFAULT_SWEEP_NOTE] if config.sweep.is_default_grid else []
        metadata = metadata_for("sweep", config, notes)
        directory = config.output.directory

        if "csv" in config.output.formats:
            write_csv(
                directory / "sweep.csv",
                SWEEP_HEADER,
                (
                    (
                        row.q0, row.dt_max, row.variance, row.normalized_variance, row.t_iso,
                        row.t_bar_num, row.t_bar_anal, row.abs_error, row.converged,
                    )
                    for row in rows
                ),
                metadata,
            )
        if "json" in config.output.formats:
            write_json(
                directory / "sweep.json", {"rows": [row.model_dump() for row in rows]}, metadata
            )

        table = Table(title=f"Validity-range sweep ({len(rows)} points)")
        table.add_column("Q0 [W/m^3]", style="cyan", justify="right")
        table.add_column("dT_max [K]", style="magenta", justify="right")
        table.add_column("Var/Ta^2", style="green", justify="right")
        table.add_column("|error| [K]", style="blue", justify="right")
        for row in rows:
            if not row.converged:
                table.add_row(f"{row.q0:.4g}", "[red]failed[/red]", "", "")
                continue
            table.add_row(
                f"{row.q0:.4g}",
                f"{row.dt_max:.4g}",
                f"{row.normalized_variance:.3e}",
                f"{row.abs_error:.3e}",
            )
        console.print(table)

        failed = sum(1 for row in rows if not row.converged)
        if failed:
            console.print(f"[red]{failed} sweep point(s) did not converge[/red]")
            ctx.exit(EXIT_NUMERICAL)


@click.command()
@run_options
@click.option("--n-base", type=int, help="Coarsest grid of the Richardson triple")
@click.option("--linearized", is_flag=True, help="Use linearized radiation")
@click.pass_context
def convergence(ctx, config_path, out_dir, formats, q0, n_cells, tol, n_base, linearized):
    """Estimate the observed order of accuracy of T(0)."""
    with exit_codes(ctx):
        overrides = collect_overrides(
            q0=q0, n_cells=n_cells, tol=tol, n_base=n_base, out=out_dir, formats=formats
        )
        config = load_for_command(config_path, overrides)
        use_linearized = linearized or config.convergence.linearized

        with console.status("[bold green]Solving on three nested grids..."):
            result = convergence_study(
                config.disk,
                config.convergence.n_base,
                tol=config.solver.tol,
                max_iter=config.solver.max_iter,
                linearized=use_linearized,
            )

        write_json(
            config.output.directory / "convergence.json",
            result.model_dump(),
            metadata_for("convergence", config),
        )

        for cells, peak in zip(result.n_cells, result.peaks):
            console.print(f"  n={cells:>6d}  T(0)={peak:.10f} K")

        if result.status == "exact":
            console.print("[green]Discrete solution identical on all grids (exact)[/green]")
            return

        console.print(f"Observed order: [bold]{result.observed_order:.3f}[/bold]")
        low, high = ORDER_RANGE
        if not low <= result.observed_order <= high:
            console.print(f"[red]Observed order outside {low}..{high}[/red]")
            ctx.exit(EXIT_NUMERICAL)


@click.command()
@run_options
@click.pass_context
def compare(ctx, config_path, out_dir, formats, q0, n_cells, tol):
    """Compare the mean temperature with T_iso and the variance-based prediction."""
    with exit_codes(ctx):
        config = load_for_command(
            config_path,
            collect_overrides(q0=q0, n_cells=n_cells, tol=tol, out=out_dir, formats=formats),
        )

        with console.status("[bold green]Solving reduced equation..."):
            result, field = compare_mean_to_isothermal(
                config.disk, config.solver.n_cells, config.solver.tol, config.solver.max_iter
            )

        metadata = metadata_for("compare", config)
        directory = config.output.directory
        if "csv" in config.output.formats:
            rows = zip(field.grid.centers.tolist(), field.values.tolist())
            write_csv(directory / "profile.csv", PROFILE_HEADER, rows, metadata)
        if "json" in config.output.formats:
            write_json(directory / "comparison.json", result.model_dump(), metadata)

        stats = result.stats
        table = Table(title="Mean vs isothermal temperature", show_header=False)
        table.add_column("Metric", style="cyan", width=32)
        table.add_column("Value", style="magenta")
        table.add_row("T_iso", format_temperature(stats.t_iso))
        table.add_row("T_bar (numerical)", format_temperature(stats.t_bar))
        table.add_row("T_bar (variance relation)", format_temperature(stats.t_bar_anal))
        table.add_row("Reduction (numerical)", f"{result.reduction_num:.6g} K")
        table.add_row("Reduction (3/2Ta Var)", f"{result.reduction_anal:.6g} K")
        table.add_row("Captured fraction", f"{result.captured_fraction:.4%}")
        table.add_row("Radiated / input power", f"{result.radiated_power:.6g} / {result.p_in:.6g} W")
        console.print(table)
