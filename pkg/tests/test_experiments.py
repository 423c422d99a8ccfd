"""Tests for the sweep, validation, convergence and comparison studies."""

import math

import numpy as np
import pytest

from radiant_disk.exceptions import ConvergenceError, SingularSystemError, StudyError
from radiant_disk.experiments import (
    compare_mean_to_isothermal,
    convergence_study,
    run_sweep,
    validate_thin_plate,
)
from radiant_disk.models import SolveReport, SweepSpec
from radiant_disk.solver1d import solve_reduced


def _spec(base, **kwargs):
    values = {"q0_min": 1e6, "q0_max": 1e9, "n_points": 4, "n_cells": 400}
    values.update(kwargs)
    return SweepSpec(base=base, **values)


def test_run_sweep_rows_in_q0_order(reference_params):
    """Test sweep rows follow q0 and grow with it."""
    rows = run_sweep(_spec(reference_params))

    assert [row.q0 for row in rows] == pytest.approx([1e6, 1e7, 1e8, 1e9], rel=1e-12)
    assert all(row.converged for row in rows)
    for column in ("dt_max", "variance", "t_iso", "abs_error"):
        values = [getattr(row, column) for row in rows]
        assert values == sorted(values), column
    for row in rows:
        assert row.t_bar_num <= row.t_iso
        assert row.abs_error == pytest.approx(abs(row.t_bar_num - row.t_bar_anal))
        assert row.normalized_variance == pytest.approx(row.variance / 300.0**2)


def test_run_sweep_include_zero(reference_params):
    """Test the optional zero point has no rise, no variance and no error."""
    rows = run_sweep(_spec(reference_params, n_points=2, include_zero=True))

    assert len(rows) == 3
    zero = rows[0]
    assert zero.q0 == 0.0
    assert zero.converged
    assert zero.dt_max == 0.0
    assert zero.variance == 0.0
    assert zero.abs_error == pytest.approx(0.0, abs=1e-12)


def test_run_sweep_single_point(reference_params):
    """Test a one-point sweep returns exactly one row."""
    rows = run_sweep(_spec(reference_params, q0_min=1e8, q0_max=1e8, n_points=1))

    assert len(rows) == 1
    assert rows[0].q0 == 1e8


def test_run_sweep_marks_failed_points(reference_params, mocker):
    """Test a non-converged point is kept and marked instead of aborting the sweep."""

    def flaky(params, *args, **kwargs):
        if math.isclose(params.q0, 1e7, rel_tol=1e-9):
            return solve_reduced(params, 20, max_iter=1)
        return solve_reduced(params, *args, **kwargs)

    mocker.patch("radiant_disk.experiments.solve_reduced", side_effect=flaky)

    rows = run_sweep(_spec(reference_params, n_points=3, q0_min=1e5, q0_max=1e9))

    assert [row.converged for row in rows] == [True, False, True]
    assert math.isnan(rows[1].abs_error)
    assert rows[1].t_iso > 300.0


def test_run_sweep_all_points_failed(reference_params, mocker):
    """Test a sweep where every point fails raises StudyError."""
    mocker.patch(
        "radiant_disk.experiments.solve_reduced",
        side_effect=SingularSystemError("singular"),
    )

    with pytest.raises(StudyError, match="all 4 sweep points failed"):
        run_sweep(_spec(reference_params))


def test_run_sweep_workers_keep_order(reference_params):
    """Test a threaded sweep reproduces the sequential rows exactly."""
    sequential = run_sweep(_spec(reference_params, n_points=5))
    threaded = run_sweep(_spec(reference_params, n_points=5, workers=3))

    assert [row.model_dump() for row in threaded] == [row.model_dump() for row in sequential]


def test_run_sweep_third_order_ratio(reference_params):
    """Test doubling q0 in the small-deviation regime scales abs_error by 4 to 16."""
    rows = run_sweep(
        SweepSpec(base=reference_params, q0_min=1e6, q0_max=2e6, n_points=2, n_cells=2000)
    )

    ratio = rows[1].abs_error / rows[0].abs_error
    assert 4.0 <= ratio <= 16.0


@pytest.mark.slow
def test_default_sweep_error_behaviour(reference_params):
    """Test the default 25-point sweep: error grows with dT_max and is small for small variance."""
    rows = run_sweep(SweepSpec(base=reference_params, q0_min=1e6, q0_max=1e9, n_points=25))

    assert all(row.converged for row in rows)
    for previous, current in zip(rows, rows[1:]):
        assert current.dt_max > previous.dt_max
        assert current.abs_error >= previous.abs_error - 1e-6
    for row in rows:
        if row.normalized_variance < 1e-4:
            assert row.abs_error < 0.01


def test_convergence_study_table2(reference_params):
    """Test the observed order of T(0) is close to two."""
    result = convergence_study(reference_params, 250)

    assert result.status == "ok"
    assert result.n_cells == [250, 500, 1000]
    assert 1.8 <= result.observed_order <= 2.2
    assert result.peaks[0] < result.peaks[1] < result.peaks[2] or (
        result.peaks[0] > result.peaks[1] > result.peaks[2]
    )


def test_convergence_study_linearized(reference_params):
    """Test the linearized problem also converges at second order."""
    result = convergence_study(reference_params, 250, linearized=True)

    assert result.linearized
    assert 1.8 <= result.observed_order <= 2.2


def test_convergence_study_uniform_source_is_exact(reference_params):
    """Test a = R gives identical peaks on every grid."""
    result = convergence_study(reference_params.with_changes(source_radius=0.1, q0=1e5), 50)

    assert result.status == "exact"
    assert result.observed_order is None
    assert np.ptp(result.peaks) < 1e-9 * result.peaks[0]


def test_convergence_study_rejects_small_base(reference_params):
    """Test n_base below the minimum is a usage error."""
    with pytest.raises(ValueError, match="at least 50"):
        convergence_study(reference_params, 10)


def test_convergence_study_requires_convergence(reference_params):
    """Test a non-converged grid aborts the study."""
    with pytest.raises(ConvergenceError) as excinfo:
        convergence_study(reference_params, 100, max_iter=1)

    assert isinstance(excinfo.value.report, SolveReport)
    assert not excinfo.value.report.converged


def test_validate_thin_plate_zero_source(reference_params):
    """Test the comparison of two ambient fields reports no deviation."""
    result, field_2d = validate_thin_plate(
        reference_params.with_changes(q0=0.0), n_cells=50, nr=50, nz=4
    )

    assert result.peak_rise == 0.0
    assert result.peak_rise_deviation == 0.0
    assert result.profile_max_deviation == 0.0
    assert field_2d.values.shape == (50, 4)


def test_validate_thin_plate_small_mesh(reference_params):
    """Test a reduced-resolution comparison of the thin reference disk."""
    result, _ = validate_thin_plate(reference_params, n_cells=400, nr=400, nz=4)

    assert result.report_1d.converged and result.report_2d.converged
    assert result.peak_rise > 100.0
    assert result.peak_rise_deviation < 0.01
    assert result.peak_relative_deviation < result.peak_rise_deviation
    assert result.z_variation < 0.05 * result.peak_rise


@pytest.mark.slow
def test_validate_thin_plate_table2(reference_params):
    """Test the default-resolution comparison stays below one percent of the peak rise."""
    result, field_2d = validate_thin_plate(reference_params)

    assert field_2d.values.shape == (800, 10)
    assert result.peak_rise_deviation < 0.01
    assert result.profile_max_deviation < 0.01 * result.peak_rise


@pytest.mark.slow
def test_validate_thick_disk_deviates_more(reference_params):
    """Test the reduction degrades as the disk gets thicker."""
    thick = reference_params.with_changes(thickness=0.05)

    thin_result, _ = validate_thin_plate(reference_params, n_cells=200, nr=200, nz=10)
    thick_result, _ = validate_thin_plate(thick, n_cells=200, nr=200, nz=10)

    assert thick_result.peak_rise_deviation > thin_result.peak_rise_deviation


def test_validate_thin_plate_non_convergence(reference_params):
    """Test a failing solve is raised rather than compared."""
    with pytest.raises(ConvergenceError, match="reduced solve"):
        validate_thin_plate(reference_params, n_cells=100, nr=50, nz=4, max_iter=1)


def test_compare_mean_to_isothermal_table2(reference_params):
    """Test the mean-temperature comparison for the reference disk."""
    result, field = compare_mean_to_isothermal(reference_params, 1000)

    assert field.grid.n_cells == 1000
    assert result.reduction_num > 0
    assert result.reduction_anal > 0
    # at least 90% of the reduction is explained by the variance term
    assert 0.9 < result.captured_fraction < 1.1
    assert result.radiated_power == pytest.approx(result.p_in, rel=1e-6)
    assert result.p_in == pytest.approx(math.pi)
    assert result.stats.t_iso - result.stats.t_bar == pytest.approx(result.reduction_num)
