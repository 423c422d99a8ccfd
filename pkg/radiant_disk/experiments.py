"""Studies built on the solvers: thin-plate validation, sweep, grid convergence."""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from radiant_disk.exceptions import ConvergenceError, SolverError, StudyError
from radiant_disk.models import (
    ConvergenceResult,
    DiskParams,
    MeanComparison,
    SweepRow,
    SweepSpec,
    ThinPlateComparison,
    derive,
    isothermal_temperature,
)
from radiant_disk.solver1d import (
    DEFAULT_MAX_ITER,
    DEFAULT_N_CELLS,
    TemperatureField1D,
    build_grid,
    refine_grid,
    solve_reduced,
)
from radiant_disk.solver2d import (
    DEFAULT_NR,
    DEFAULT_NZ,
    TemperatureField2D,
    extract_midplane,
    solve_full,
)
from radiant_disk.stats import compute_stats, radiated_power, variance_correction

logger = logging.getLogger(__name__)

MIN_CONVERGENCE_BASE = 50
# differences below this fraction of T(0) are treated as round-off
EXACT_THRESHOLD = 1e-9

DEFAULT_SWEEP_NOTE = (
    "default validity-range grid: 25 log-spaced q0 values in [1e6, 1e9] W/m^3"
)


def _sweep_point(spec: SweepSpec, q0: float) -> SweepRow:
    params = spec.base.with_changes(q0=q0)
    t_iso = isothermal_temperature(params)
    try:
        field, report = solve_reduced(params, spec.n_cells, spec.tol, spec.max_iter)
    except SolverError as e:
        logger.warning("sweep point q0=%.6g failed: %s", q0, e)
        return SweepRow.failed(q0, t_iso)

    if not report.converged:
        logger.warning("sweep point q0=%.6g did not converge", q0)
        return SweepRow.failed(q0, t_iso)

    stats = compute_stats(field, params)
    return SweepRow(
        q0=q0,
        dt_max=stats.dt_max,
        variance=stats.variance,
        normalized_variance=stats.normalized_variance,
        t_iso=stats.t_iso,
        t_bar_num=stats.t_bar,
        t_bar_anal=stats.t_bar_anal,
        abs_error=stats.relation_error,
        converged=True,
    )


def run_sweep(spec: SweepSpec) -> list[SweepRow]:
    """Solve and evaluate every q0 of the sweep, in increasing q0 order.

    Points run on ``spec.workers`` threads; rows keep the q0 order. A point
    that fails is kept as a row with ``converged=False``.

    Raises:
        StudyError: If every point failed
    """
    q0_values = spec.q0_values()

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            rows = list(pool.map(lambda q0: _sweep_point(spec, q0), q0_values))
    else:
        rows = [_sweep_point(spec, q0) for q0 in q0_values]

    if not any(row.converged for row in rows):
        raise StudyError(f"all {len(rows)} sweep points failed")
    return rows


def _require_converged(report, what: str) -> None:
    if not report.converged:
        raise ConvergenceError(
            f"{what} did not converge (residual {report.residual_norm:.3e} > tol {report.tol:.3e})",
            report,
        )


def validate_thin_plate(
    params: DiskParams,
    n_cells: int = DEFAULT_N_CELLS,
    nr: int = DEFAULT_NR,
    nz: int = DEFAULT_NZ,
    tol: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[ThinPlateComparison, TemperatureField2D]:
    """Compare the reduced solve with the mid-plane of the (r, z) solve.

    Returns:
        The comparison record and the (r, z) field it was taken from

    Raises:
        ConvergenceError: If either solve does not converge
    """
    field_1d, report_1d = solve_reduced(params, n_cells, tol, max_iter)
    _require_converged(report_1d, "reduced solve")
    field_2d, report_2d = solve_full(params, nr, nz, tol, max_iter)
    _require_converged(report_2d, "axisymmetric solve")

    midplane = extract_midplane(field_2d)
    peak_1d = field_1d.axis_value
    peak_2d = midplane.axis_value
    peak_rise = peak_1d - params.t_ambient
    gap = abs(peak_1d - peak_2d)

    reduced_on_mesh = np.interp(
        midplane.grid.centers, field_1d.grid.centers, field_1d.values
    )
    top = field_2d.surface_profile("top").values
    bottom = field_2d.surface_profile("bottom").values

    comparison = ThinPlateComparison(
        peak_1d=peak_1d,
        peak_2d_midplane=peak_2d,
        peak_rise=peak_rise,
        peak_rise_deviation=gap / peak_rise if peak_rise > 0 else 0.0,
        peak_relative_deviation=gap / peak_1d,
        profile_max_deviation=float(np.max(np.abs(reduced_on_mesh - midplane.values))),
        z_variation=float(np.max(np.abs(top - bottom))),
        report_1d=report_1d,
        report_2d=report_2d,
    )
    return comparison, field_2d


def convergence_study(
    params: DiskParams,
    n_base: int = 250,
    tol: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    linearized: bool = False,
) -> ConvergenceResult:
    """Observed order of T(0) from nested grids of n, 2n and 4n cells.

    Raises:
        ValueError: If n_base is below MIN_CONVERGENCE_BASE
        ConvergenceError: If any of the three solves does not converge
    """
    if n_base < MIN_CONVERGENCE_BASE:
        raise ValueError(f"n_base must be at least {MIN_CONVERGENCE_BASE}, got {n_base}")

    base = build_grid(params, n_base)
    peaks = []
    sizes = []
    for factor in (1, 2, 4):
        grid = refine_grid(base, factor)
        field, report = solve_reduced(
            params, tol=tol, max_iter=max_iter, linearized=linearized, grid=grid
        )
        _require_converged(report, f"solve on {grid.n_cells} cells")
        peaks.append(field.axis_value)
        sizes.append(grid.n_cells)

    coarse_gap = abs(peaks[0] - peaks[1])
    fine_gap = abs(peaks[1] - peaks[2])
    noise = EXACT_THRESHOLD * abs(peaks[0])

    if coarse_gap <= noise and fine_gap <= noise:
        return ConvergenceResult(
            n_cells=sizes, peaks=peaks, observed_order=None, status="exact", linearized=linearized
        )
    if fine_gap == 0.0:
        raise ConvergenceError("finest grids agree exactly; observed order undefined")

    return ConvergenceResult(
        n_cells=sizes,
        peaks=peaks,
        observed_order=math.log2(coarse_gap / fine_gap),
        status="ok",
        linearized=linearized,
    )


def compare_mean_to_isothermal(
    params: DiskParams,
    n_cells: int = DEFAULT_N_CELLS,
    tol: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[MeanComparison, TemperatureField1D]:
    """Mean temperature of the solved profile against T_iso and the variance relation.

    Raises:
        ConvergenceError: If the solve does not converge
    """
    field, report = solve_reduced(params, n_cells, tol, max_iter)
    _require_converged(report, "reduced solve")

    stats = compute_stats(field, params)
    reduction_num = stats.t_iso - stats.t_bar
    reduction_anal = variance_correction(stats.variance, params.t_ambient)

    comparison = MeanComparison(
        stats=stats,
        reduction_num=reduction_num,
        reduction_anal=reduction_anal,
        captured_fraction=reduction_anal / reduction_num if reduction_num > 0 else 1.0,
        radiated_power=radiated_power(field, params),
        p_in=derive(params).p_in,
        report=report,
    )
    return comparison, field
