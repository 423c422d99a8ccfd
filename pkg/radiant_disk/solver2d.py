"""Axisymmetric (r, z) conduction solver with a radiating top face.

Cells are ordered column by column (index ``i * nz + j``, j = 0 at the
bottom), so radial neighbours sit nz apart and the Newton matrix is banded
with bandwidth nz.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from radiant_disk.exceptions import SingularSystemError
from radiant_disk.models import DiskParams, SolveReport
from radiant_disk.solver1d import (
    DEFAULT_MAX_ITER,
    MAX_HALVINGS,
    ROUNDING_SAFETY,
    RadialGrid,
    TemperatureField1D,
    build_grid,
    default_tolerance,
    quartic_excess,
)

logger = logging.getLogger(__name__)

MIN_NR = 8
MIN_NZ = 3
DEFAULT_NR = 800
DEFAULT_NZ = 10


@dataclass(frozen=True)
class Mesh2D:
    """Structured (r, z) mesh: RadialGrid columns times uniform layers."""

    radial: RadialGrid
    z_faces: np.ndarray

    @property
    def nr(self) -> int:
        return self.radial.n_cells

    @property
    def nz(self) -> int:
        return len(self.z_faces) - 1

    @property
    def dz(self) -> float:
        return float(self.z_faces[1] - self.z_faces[0])

    @property
    def z_centers(self) -> np.ndarray:
        return 0.5 * (self.z_faces[:-1] + self.z_faces[1:])

    @property
    def cell_volumes(self) -> np.ndarray:
        """V_ij = A_i * dz, shape (nr, nz)."""
        return np.repeat(self.radial.cell_areas[:, None] * self.dz, self.nz, axis=1)


@dataclass(frozen=True)
class TemperatureField2D:
    """Cell-center temperatures, shape (nr, nz) [K]."""

    mesh: Mesh2D
    values: np.ndarray

    def surface_profile(self, side: str = "top") -> TemperatureField1D:
        """Temperatures of the top or bottom cell layer."""
        layer = -1 if side == "top" else 0
        return TemperatureField1D(self.mesh.radial, self.values[:, layer].copy())


def build_mesh(params: DiskParams, nr: int, nz: int) -> Mesh2D:
    """Radial faces as in build_grid, uniform axial faces on [0, h]."""
    if nr < MIN_NR:
        raise ValueError(f"nr must be at least {MIN_NR}, got {nr}")
    if nz < MIN_NZ:
        raise ValueError(f"nz must be at least {MIN_NZ}, got {nz}")
    return Mesh2D(
        radial=build_grid(params, nr),
        z_faces=np.linspace(0.0, params.thickness, nz + 1),
    )


class _Conductances:
    """Face conductances k*A/d of a mesh, in W/K."""

    def __init__(self, mesh: Mesh2D, conductivity: float):
        radial = mesh.radial
        self.volumes = radial.cell_areas * mesh.dz  # per column
        # faces between column i and i+1
        self.radial = (
            conductivity * 2 * np.pi * radial.faces[1:-1] * mesh.dz / np.diff(radial.centers)
        )
        # faces between layer j and j+1, same in every layer
        self.axial = conductivity * radial.cell_areas / mesh.dz


def _residual_2d(
    values: np.ndarray,
    mesh: Mesh2D,
    params: DiskParams,
    cond: _Conductances,
) -> np.ndarray:
    """Cell energy balance divided by k*V, shape (nr, nz) [K/m^2]."""
    balance = np.zeros_like(values)

    radial_flow = cond.radial[:, None] * (values[1:, :] - values[:-1, :])
    balance[:-1, :] += radial_flow
    balance[1:, :] -= radial_flow

    axial_flow = cond.axial[:, None] * (values[:, 1:] - values[:, :-1])
    balance[:, :-1] += axial_flow
    balance[:, 1:] -= axial_flow

    source = np.where(mesh.radial.source_mask, params.q0, 0.0) * cond.volumes
    balance += source[:, None]

    emitter = params.emissivity * params.sigma * mesh.radial.cell_areas
    balance[:, -1] -= emitter * quartic_excess(values[:, -1], params.t_ambient)

    return balance / (params.conductivity * cond.volumes[:, None])


def _rounding_floor(values: np.ndarray, params: DiskParams, cond: _Conductances) -> float:
    """Residual noise of a field at round-off level, as in solver1d.rounding_floor."""
    radial = np.zeros(len(cond.volumes))
    radial[:-1] += cond.radial
    radial[1:] += cond.radial
    diagonal = (2 * cond.axial + radial) / (params.conductivity * cond.volumes)
    return ROUNDING_SAFETY * np.finfo(float).eps * float(np.max(values)) * float(np.max(diagonal))


def _jacobian_banded(
    values: np.ndarray,
    mesh: Mesh2D,
    params: DiskParams,
    cond: _Conductances,
) -> np.ndarray:
    """Newton matrix in solve_banded layout with l = u = nz."""
    nr, nz = values.shape
    n = nr * nz
    row_scale = 1.0 / (params.conductivity * cond.volumes)  # per column

    # coupling to the cell above (and, by symmetry of a column, below)
    axial = np.zeros((nr, nz))
    axial[:, :-1] = (cond.axial * row_scale)[:, None]

    # coupling to the next column outward, rows i and i+1
    outward = np.repeat((cond.radial * row_scale[:-1])[:, None], nz, axis=1)
    inward = np.repeat((cond.radial * row_scale[1:])[:, None], nz, axis=1)

    diag = np.zeros((nr, nz))
    diag[:, :-1] -= axial[:, :-1]
    diag[:, 1:] -= axial[:, :-1]
    diag[:-1, :] -= outward
    diag[1:, :] -= inward
    emitter = params.emissivity * params.sigma * mesh.radial.cell_areas
    diag[:, -1] -= 4 * emitter * values[:, -1] ** 3 * row_scale

    ab = np.zeros((2 * nz + 1, n))
    ab[nz] = diag.ravel()
    axial_flat = axial.ravel()[:-1]
    ab[nz - 1, 1:] = axial_flat
    ab[nz + 1, :-1] = axial_flat
    ab[0, nz:] = outward.ravel()
    ab[2 * nz, :-nz] = inward.ravel()
    return ab


def solve_full(
    params: DiskParams,
    nr: int = DEFAULT_NR,
    nz: int = DEFAULT_NZ,
    tol: Optional[float] = None,
    max_iter: int = DEFAULT_MAX_ITER,
) -> tuple[TemperatureField2D, SolveReport]:
    """Solve div(k grad T) + Q = 0 on the (r, z) disk section.

    The top face radiates eps*sigma*(T_s^4 - Ta^4) with T_s taken at the top
    cell center; bottom, rim and axis are adiabatic. The source acts at every
    depth inside r < a.

    The reported tolerance is raised to the round-off floor of the mesh
    when that floor exceeds the requested one.

    Raises:
        ValueError: If nr or nz is below its minimum
        SingularSystemError: If a Newton linear system cannot be solved
    """
    mesh = build_mesh(params, nr, nz)
    if tol is None:
        tol = default_tolerance(params)
    cond = _Conductances(mesh, params.conductivity)

    values = np.full((mesh.nr, mesh.nz), params.t_ambient)
    res = _residual_2d(values, mesh, params, cond)
    norm = float(np.max(np.abs(res)))

    iterations = 0
    damping_events = 0

    while norm > tol and iterations < max_iter:
        ab = _jacobian_banded(values, mesh, params, cond)
        try:
            delta = solve_banded((nz, nz), ab, -res.ravel()).reshape(values.shape)
        except (LinAlgError, ValueError) as e:
            raise SingularSystemError(f"banded solve failed: {e}") from e
        if not np.all(np.isfinite(delta)):
            raise SingularSystemError("banded solve produced non-finite values")

        step = 1.0
        accepted = None
        for halving in range(MAX_HALVINGS + 1):
            trial = values + step * delta
            if np.all(trial > 0):
                trial_res = _residual_2d(trial, mesh, params, cond)
                trial_norm = float(np.max(np.abs(trial_res)))
                if trial_norm < norm:
                    accepted = (trial, trial_res, trial_norm)
                    break
            if halving < MAX_HALVINGS:
                step *= 0.5
                damping_events += 1

        if accepted is None:
            logger.debug("2-D newton stalled at residual %.3e", norm)
            break

        values, res, norm = accepted
        iterations += 1
        logger.debug("2-D newton step %d: residual %.3e", iterations, norm)

    floor = _rounding_floor(values, params, cond)
    if floor > tol:
        logger.debug("2-D tolerance %.3e raised to rounding floor %.3e", tol, floor)
        tol = floor

    report = SolveReport(
        converged=norm <= tol,
        iterations=iterations,
        residual_norm=norm,
        damping_events=damping_events,
        tol=tol,
    )
    if not report.converged:
        logger.warning("2-D solve did not converge: residual %.3e > tol %.3e", norm, tol)
    return TemperatureField2D(mesh, values), report


def extract_midplane(field: TemperatureField2D) -> TemperatureField1D:
    """Radial profile at z = h/2.

    With an even number of layers the two layers straddling the mid-plane
    are averaged.
    """
    nz = field.mesh.nz
    if nz < 2:
        raise ValueError(f"mid-plane extraction needs nz >= 2, got {nz}")

    half = nz // 2
    if nz % 2:
        profile = field.values[:, half].copy()
    else:
        profile = 0.5 * (field.values[:, half - 1] + field.values[:, half])
    return TemperatureField1D(field.mesh.radial, profile)
