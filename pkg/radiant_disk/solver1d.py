"""Finite-volume Newton solver for the thickness-averaged disk equation.

The reduced steady balance on 0 <= r <= R is

    (1/r) d/dr (r dT/dr) - alpha (T^4 - Ta^4) + Q(r)/k = 0

with dT/dr = 0 at the axis (regularity) and at the rim (adiabatic). Each
cell balance is written in flux form, so the conduction terms cancel in the
area-weighted sum and the discrete power balance holds to Newton tolerance.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from radiant_disk.exceptions import SingularSystemError
from radiant_disk.models import DiskParams, SolveReport, derive

logger = logging.getLogger(__name__)

MIN_CELLS = 8
MIN_SEGMENT_CELLS = 2
MAX_HALVINGS = 30
# residual noise of a converged field, in units of eps * max(T) * max|stencil diagonal|
ROUNDING_SAFETY = 4.0
DEFAULT_N_CELLS = 2000
DEFAULT_MAX_ITER = 50


@dataclass(frozen=True)
class RadialGrid:
    """Cell-centered radial grid on [0, R] with a face on the source edge."""

    faces: np.ndarray
    centers: np.ndarray
    cell_areas: np.ndarray
    source_face: int  # faces[source_face] == a; cells below it carry the source

    @classmethod
    def from_faces(cls, faces: np.ndarray, source_face: int) -> "RadialGrid":
        faces = np.asarray(faces, dtype=float)
        if faces[0] != 0.0 or np.any(np.diff(faces) <= 0):
            raise ValueError("faces must start at 0 and increase strictly")
        return cls(
            faces=faces,
            centers=0.5 * (faces[:-1] + faces[1:]),
            cell_areas=np.pi * (faces[1:] ** 2 - faces[:-1] ** 2),
            source_face=source_face,
        )

    @property
    def n_cells(self) -> int:
        return len(self.centers)

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.faces)

    @property
    def source_mask(self) -> np.ndarray:
        """Boolean mask of cells inside the heated region."""
        return np.arange(self.n_cells) < self.source_face


@dataclass(frozen=True)
class TemperatureField1D:
    """Cell-center temperatures on a RadialGrid [K]."""

    grid: RadialGrid
    values: np.ndarray

    def theta(self, t_ambient: float) -> np.ndarray:
        """Temperature rise above ambient."""
        return self.values - t_ambient

    @property
    def axis_value(self) -> float:
        """Temperature of the cell nearest the axis."""
        return float(self.values[0])


@dataclass(frozen=True)
class Tridiagonal:
    """Tridiagonal matrix stored by diagonals, each of length n.

    ``lower[i]`` multiplies x[i-1] in row i (lower[0] unused), ``upper[i]``
    multiplies x[i+1] (upper[-1] unused).
    """

    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def to_banded(self) -> np.ndarray:
        """Pack into the (l, u) = (1, 1) layout of scipy.linalg.solve_banded."""
        n = len(self.diag)
        ab = np.zeros((3, n))
        ab[0, 1:] = self.upper[:-1]
        ab[1] = self.diag
        ab[2, :-1] = self.lower[1:]
        return ab

    def to_dense(self) -> np.ndarray:
        return (
            np.diag(self.diag)
            + np.diag(self.upper[:-1], k=1)
            + np.diag(self.lower[1:], k=-1)
        )

    def matvec(self, x: np.ndarray) -> np.ndarray:
        y = self.diag * x
        y[:-1] += self.upper[:-1] * x[1:]
        y[1:] += self.lower[1:] * x[:-1]
        return y


def build_grid(params: DiskParams, n_cells: int) -> RadialGrid:
    """Build a two-segment grid, uniform on [0, a] and on [a, R].

    Cell counts per segment follow the segment lengths (each at least two
    cells) and the two segments share the face at r = a.

    Raises:
        ValueError: If n_cells is below MIN_CELLS
    """
    if n_cells < MIN_CELLS:
        raise ValueError(f"n_cells must be at least {MIN_CELLS}, got {n_cells}")

    radius, a = params.radius, params.source_radius
    if a >= radius:
        return RadialGrid.from_faces(np.linspace(0.0, radius, n_cells + 1), n_cells)

    n_inner = round(n_cells * a / radius)
    n_inner = min(max(MIN_SEGMENT_CELLS, n_inner), n_cells - MIN_SEGMENT_CELLS)
    n_outer = n_cells - n_inner

    faces = np.concatenate([
        np.linspace(0.0, a, n_inner + 1),
        np.linspace(a, radius, n_outer + 1)[1:],
    ])
    logger.debug("grid: %d inner + %d outer cells", n_inner, n_outer)
    return RadialGrid.from_faces(faces, n_inner)


def refine_grid(grid: RadialGrid, factor: int) -> RadialGrid:
    """Split every cell into ``factor`` equal sub-cells (nested refinement)."""
    if factor < 1:
        raise ValueError(f"refinement factor must be positive, got {factor}")

    left = grid.faces[:-1, None]
    width = np.diff(grid.faces)[:, None]
    inner = (left + width * (np.arange(factor)[None, :] / factor)).ravel()
    faces = np.append(inner, grid.faces[-1])
    return RadialGrid.from_faces(faces, grid.source_face * factor)


def quartic_excess(values: np.ndarray, t_ambient: float) -> np.ndarray:
    """T^4 - Ta^4 evaluated in the theta frame (no cancellation near Ta)."""
    theta = values - t_ambient
    ta = t_ambient
    return theta * (4 * ta**3 + theta * (6 * ta**2 + theta * (4 * ta + theta)))


def default_tolerance(params: DiskParams) -> float:
    """Residual tolerance scaled to the magnitude of the radiative term."""
    return 1e-8 * derive(params).alpha * params.t_ambient**4


def rounding_floor(field: TemperatureField1D) -> float:
    """Smallest residual max-norm the grid resolves in double precision [K/m^2].

    Rounding of the cell temperatures alone perturbs the conduction term by
    about eps * T * |diagonal|, which grows as the cells near the axis shrink.
    """
    diagonal = np.abs(conduction_stencil(field.grid).diag)
    return ROUNDING_SAFETY * np.finfo(float).eps * float(np.max(field.values)) * float(np.max(diagonal))


def _face_coefficients(grid: RadialGrid) -> np.ndarray:
    """r_f / (r_{i+1} - r_i) on interior faces; zero on the axis and rim."""
    coeff = np.zeros(grid.n_cells + 1)
    coeff[1:-1] = grid.faces[1:-1] / np.diff(grid.centers)
    return coeff


def _cell_scale(grid: RadialGrid) -> np.ndarray:
    """1 / (r_i dr_i), equal to 2 pi / A_i."""
    return 1.0 / (grid.centers * grid.widths)


def _check_positive(values: np.ndarray) -> None:
    if np.any(values <= 0) or not np.all(np.isfinite(values)):
        raise ValueError("temperature field must be finite and positive")


def conduction_stencil(grid: RadialGrid) -> Tridiagonal:
    """Linear conduction operator of the reduced equation."""
    coeff = _face_coefficients(grid)
    scale = _cell_scale(grid)
    lower = coeff[:-1] * scale
    upper = coeff[1:] * scale
    return Tridiagonal(lower=lower, diag=-(lower + upper), upper=upper)


def residual(
    field: TemperatureField1D,
    params: DiskParams,
    linearized: bool = False,
) -> np.ndarray:
    """Per-cell residual of the reduced equation [K/m^2].

    Args:
        field: Trial temperatures
        params: Disk parameters
        linearized: Replace T^4 - Ta^4 with 4 Ta^3 (T - Ta)

    Raises:
        ValueError: If any temperature is not positive
    """
    values = field.values
    _check_positive(values)
    grid = field.grid
    alpha = derive(params).alpha

    flux = np.zeros(grid.n_cells + 1)
    flux[1:-1] = _face_coefficients(grid)[1:-1] * np.diff(values)
    conduction = (flux[1:] - flux[:-1]) * _cell_scale(grid)

    if linearized:
        loss = alpha * 4 * params.t_ambient**3 * (values - params.t_ambient)
    else:
        loss = alpha * quartic_excess(values, params.t_ambient)

    source = np.where(grid.source_mask, params.q0 / params.conductivity, 0.0)
    return conduction - loss + source


def jacobian(
    field: TemperatureField1D,
    params: DiskParams,
    linearized: bool = False,
) -> Tridiagonal:
    """Analytic Jacobian of :func:`residual` with respect to the cell temperatures."""
    values = field.values
    _check_positive(values)
    alpha = derive(params).alpha
    stencil = conduction_stencil(field.grid)

    if linearized:
        radiation = np.full_like(values, 4 * alpha * params.t_ambient**3)
    else:
        radiation = 4 * alpha * values**3

    return Tridiagonal(
        lower=stencil.lower,
        diag=stencil.diag - radiation,
        upper=stencil.upper,
    )


def solve_reduced(
    params: DiskParams,
    n_cells: int = DEFAULT_N_CELLS,
    tol: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
    *,
    linearized: bool = False,
    grid: Optional[RadialGrid] = None,
) -> tuple[TemperatureField1D, SolveReport]:
    """Solve the reduced equation by damped Newton iteration from T = Ta.

    Args:
        params: Validated disk parameters
        n_cells: Number of radial cells (ignored when ``grid`` is given)
        tol: Max-norm residual tolerance (default 1e-8 * alpha * Ta^4). The
            report carries the effective tolerance, never below
            :func:`rounding_floor` of the final field
        max_iter: Maximum number of Newton steps
        linearized: Solve the problem with linearized radiation
        grid: Prebuilt grid, e.g. from :func:`refine_grid`

    Returns:
        Converged (or last) field and the solve report

    Raises:
        SingularSystemError: If a Newton linear system cannot be solved
    """
    if grid is None:
        grid = build_grid(params, n_cells)
    if tol is None:
        tol = default_tolerance(params)

    values = np.full(grid.n_cells, params.t_ambient)
    current = TemperatureField1D(grid, values)
    res = residual(current, params, linearized)
    norm = float(np.max(np.abs(res)))

    iterations = 0
    damping_events = 0

    while norm > tol and iterations < max_iter:
        jac = jacobian(current, params, linearized)
        try:
            delta = solve_banded((1, 1), jac.to_banded(), -res)
        except (LinAlgError, ValueError) as e:
            raise SingularSystemError(f"tridiagonal solve failed: {e}") from e
        if not np.all(np.isfinite(delta)):
            raise SingularSystemError("tridiagonal solve produced non-finite values")

        step = 1.0
        accepted = None
        for halving in range(MAX_HALVINGS + 1):
            trial_values = current.values + step * delta
            if np.all(trial_values > 0):
                trial = TemperatureField1D(grid, trial_values)
                trial_res = residual(trial, params, linearized)
                trial_norm = float(np.max(np.abs(trial_res)))
                if trial_norm < norm:
                    accepted = (trial, trial_res, trial_norm)
                    break
            if halving < MAX_HALVINGS:
                step *= 0.5
                damping_events += 1

        if accepted is None:
            logger.debug("newton stalled at residual %.3e after %d steps", norm, iterations)
            break

        current, res, norm = accepted
        iterations += 1
        logger.debug("newton step %d: residual %.3e, step %.3g", iterations, norm, step)

    floor = rounding_floor(current)
    if floor > tol:
        logger.debug("tolerance %.3e raised to rounding floor %.3e", tol, floor)
        tol = floor

    report = SolveReport(
        converged=norm <= tol,
        iterations=iterations,
        residual_norm=norm,
        damping_events=damping_events,
        tol=tol,
    )
    if not report.converged:
        logger.warning(
            "reduced solve did not converge: residual %.3e > tol %.3e after %d steps",
            norm, tol, iterations,
        )
    return current, report
