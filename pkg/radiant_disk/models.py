"""Data models for disk parameters, solver reports and study results."""

import logging
import math
from typing import Any, Mapping, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

logger = logging.getLogger(__name__)

# CODATA 2018
STEFAN_BOLTZMANN = 5.670374419e-8

# h/R above this is outside the validated thin-plate regime
THIN_PLATE_RATIO = 0.05


class DiskParams(BaseModel):
    """Physical and geometric inputs of the heated disk (SI units).

    Config files use the short symbol names (``r``, ``h``, ``k``, ``a``);
    attributes carry descriptive names.
    """

    model_config = ConfigDict(
        populate_by_name=True,
        extra="forbid",
        frozen=True,
        allow_inf_nan=False,
    )

    radius: float = Field(alias="r", gt=0)
    thickness: float = Field(alias="h", gt=0)
    conductivity: float = Field(alias="k", gt=0)
    emissivity: float = Field(gt=0, le=1)
    sigma: float = Field(STEFAN_BOLTZMANN, gt=0)
    q0: float = Field(ge=0)
    source_radius: float = Field(alias="a", gt=0)
    t_ambient: float = Field(gt=0)

    @model_validator(mode="after")
    def _source_inside_disk(self) -> "DiskParams":
        if self.source_radius > self.radius:
            raise ValueError(
                f"source radius exceeds disk radius "
                f"(a={self.source_radius!r}, r={self.radius!r})"
            )
        return self

    @property
    def aspect_ratio(self) -> float:
        """Thickness over radius, h/R."""
        return self.thickness / self.radius

    @property
    def is_thin_plate(self) -> bool:
        """True inside the regime where the thin-plate reduction is validated."""
        return self.aspect_ratio <= THIN_PLATE_RATIO

    def with_changes(self, **changes: Any) -> "DiskParams":
        """Return a re-validated copy with some fields replaced."""
        return DiskParams.model_validate({**self.model_dump(), **changes})

    def to_config(self) -> dict[str, float]:
        """Dump using the config-file key names."""
        return self.model_dump(by_alias=True)


class DerivedParams(BaseModel):
    """Quantities that follow in closed form from DiskParams."""

    model_config = ConfigDict(frozen=True)

    alpha: float  # radiative coupling eps*sigma/(k*h) [m^-2 K^-3]
    p_in: float  # total input power [W]
    area: float  # radiating area pi*R^2 [m^2]
    t_iso: float  # isothermal-equivalent temperature [K]


class SourceProfile(BaseModel):
    """Piecewise-constant volumetric source: q0 on r <= a, zero outside."""

    model_config = ConfigDict(frozen=True)

    q0: float = Field(ge=0)
    a: float = Field(gt=0)

    @classmethod
    def from_params(cls, params: DiskParams) -> "SourceProfile":
        return cls(q0=params.q0, a=params.source_radius)


def validate_params(raw: Union[DiskParams, Mapping[str, Any]]) -> DiskParams:
    """Check every parameter invariant and return a validated DiskParams.

    Args:
        raw: A DiskParams instance or a mapping using either the config
            keys (``r``, ``h``...) or attribute names

    Returns:
        Validated, immutable parameter set

    Raises:
        pydantic.ValidationError: If any invariant is violated; the message
            names the offending field
    """
    data = raw.model_dump() if isinstance(raw, DiskParams) else dict(raw)
    params = DiskParams.model_validate(data)

    if not params.is_thin_plate:
        logger.warning(
            "h/R = %.4g exceeds the thin-plate threshold %.2g; "
            "the reduced model is outside its validated regime",
            params.aspect_ratio,
            THIN_PLATE_RATIO,
        )

    return params


def isothermal_temperature(params: DiskParams) -> float:
    """Uniform temperature whose radiative loss balances the input power."""
    excess = (
        params.source_radius**2 * params.thickness * params.q0
        / (params.sigma * params.emissivity * params.radius**2)
    )
    return (params.t_ambient**4 + excess) ** 0.25


def derive(params: DiskParams) -> DerivedParams:
    """Evaluate the coupling parameter, input power and T_iso."""
    return DerivedParams(
        alpha=params.emissivity * params.sigma / (params.conductivity * params.thickness),
        p_in=math.pi * params.source_radius**2 * params.thickness * params.q0,
        area=math.pi * params.radius**2,
        t_iso=isothermal_temperature(params),
    )


def source_at(profile: SourceProfile, r: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Volumetric power density at radius ``r`` [W/m^3].

    The step is closed on the inside: ``source_at(profile, profile.a) == q0``.

    Raises:
        ValueError: If any radius is negative
    """
    radii = np.asarray(r, dtype=float)
    if np.any(radii < 0):
        raise ValueError(f"radius must be non-negative, got {r!r}")

    values = np.where(radii <= profile.a, profile.q0, 0.0)
    if values.ndim == 0:
        return float(values)
    return values


class SolveReport(BaseModel):
    """Outcome of a damped Newton solve."""

    converged: bool
    iterations: int
    residual_norm: float  # max-norm, units of the reduced equation [K/m^2]
    damping_events: int
    tol: float


class FieldStats(BaseModel):
    """Area-averaged statistics of a radial temperature field."""

    t_bar: float
    mean_t4: float
    variance: float
    dt_max: float
    t_iso: float
    t_bar_anal: float
    identity_residual: float
    relation_error: float
    normalized_variance: float


class SweepSpec(BaseModel):
    """Source-intensity sweep over otherwise fixed parameters."""

    model_config = ConfigDict(extra="forbid")

    q0_min: float = Field(gt=0)
    q0_max: float = Field(gt=0)
    n_points: int = Field(ge=1)
    log_spacing: bool = True
    include_zero: bool = False
    base: DiskParams
    n_cells: int = 2000
    tol: Optional[float] = Field(None, gt=0)
    max_iter: int = Field(50, ge=1)
    workers: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "SweepSpec":
        if self.q0_min > self.q0_max:
            raise ValueError(
                f"q0_min ({self.q0_min!r}) must not exceed q0_max ({self.q0_max!r})"
            )
        if self.n_points == 1 and self.q0_min != self.q0_max:
            raise ValueError("a single-point sweep needs q0_min == q0_max")
        return self

    def q0_values(self) -> list[float]:
        """Source intensities in increasing order."""
        if self.n_points == 1:
            values = [self.q0_min]
        elif self.log_spacing:
            values = np.geomspace(self.q0_min, self.q0_max, self.n_points).tolist()
        else:
            values = np.linspace(self.q0_min, self.q0_max, self.n_points).tolist()

        if self.include_zero:
            values = [0.0, *values]
        return values


class SweepRow(BaseModel):
    """One point of the validity-range study. Failed points carry NaNs."""

    q0: float
    dt_max: float
    variance: float
    normalized_variance: float
    t_iso: float
    t_bar_num: float
    t_bar_anal: float
    abs_error: float
    converged: bool

    @classmethod
    def failed(cls, q0: float, t_iso: float) -> "SweepRow":
        nan = float("nan")
        return cls(
            q0=q0,
            dt_max=nan,
            variance=nan,
            normalized_variance=nan,
            t_iso=t_iso,
            t_bar_num=nan,
            t_bar_anal=nan,
            abs_error=nan,
            converged=False,
        )


class ThinPlateComparison(BaseModel):
    """Reduced 1-D solve against the axisymmetric (r, z) solve."""

    peak_1d: float  # T1D at the axis cell [K]
    peak_2d_midplane: float  # mid-plane T2D at the axis cell [K]
    peak_rise: float  # T1D(0) - Ta [K]
    peak_rise_deviation: float  # |T1D(0) - T2D(0)| / (T1D(0) - Ta)
    peak_relative_deviation: float  # |T1D(0) - T2D(0)| / T1D(0)
    profile_max_deviation: float  # max |T1D - T2D,mid| on the 2-D radial centers [K]
    z_variation: float  # max |T(z=h) - T(z=0)| over columns [K]
    report_1d: SolveReport
    report_2d: SolveReport


class ConvergenceResult(BaseModel):
    """Richardson study of the axis temperature."""

    n_cells: list[int]
    peaks: list[float]
    observed_order: Optional[float]
    status: str  # "ok" or "exact"
    linearized: bool = False


class MeanComparison(BaseModel):
    """Numerical mean temperature against the isothermal and variance-based values."""

    stats: FieldStats
    reduction_num: float  # t_iso - t_bar [K]
    reduction_anal: float  # 3/(2 Ta) * Var [K]
    captured_fraction: float  # reduction_anal / reduction_num
    radiated_power: float  # [W]
    p_in: float  # [W]
    report: SolveReport
