"""Area-averaged statistics and the variance relation for mean temperature."""

from typing import Callable, Optional

import numpy as np

from radiant_disk.models import DiskParams, FieldStats, derive
from radiant_disk.solver1d import TemperatureField1D, quartic_excess


def area_mean(
    field: TemperatureField1D,
    f: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> float:
    """Area-weighted mean of f(T) using the solver's own cell areas.

    Args:
        field: Radial temperature field
        f: Per-cell transform (identity when omitted)

    Raises:
        ValueError: If the field is empty
    """
    if field.values.size == 0:
        raise ValueError("cannot average an empty field")

    values = field.values if f is None else f(field.values)
    return float(np.average(values, weights=field.grid.cell_areas))


def radiated_power(field: TemperatureField1D, params: DiskParams) -> float:
    """Total radiated power eps*sigma * sum A_i (T_i^4 - Ta^4) [W]."""
    excess = quartic_excess(field.values, params.t_ambient)
    return float(params.emissivity * params.sigma * np.sum(field.grid.cell_areas * excess))


def variance_correction(variance: float, t_ambient: float) -> float:
    """Second-order mean-temperature reduction 3/(2 Ta) * Var."""
    return 1.5 * variance / t_ambient


def compute_stats(field: TemperatureField1D, params: DiskParams) -> FieldStats:
    """Statistics of a converged field against the isothermal equivalent."""
    t_ambient = params.t_ambient
    t_iso = derive(params).t_iso

    theta = field.theta(t_ambient)
    weights = field.grid.cell_areas
    mean_theta = float(np.average(theta, weights=weights))
    # two-pass form in the theta frame
    variance = float(np.average((theta - mean_theta) ** 2, weights=weights))

    t_bar = t_ambient + mean_theta
    mean_t4 = area_mean(field, lambda values: values**4)
    t_bar_anal = t_iso - variance_correction(variance, t_ambient)

    return FieldStats(
        t_bar=t_bar,
        mean_t4=mean_t4,
        variance=variance,
        dt_max=field.axis_value - t_ambient,
        t_iso=t_iso,
        t_bar_anal=t_bar_anal,
        identity_residual=abs(mean_t4 - t_iso**4) / t_iso**4,
        relation_error=abs(t_bar - t_bar_anal),
        normalized_variance=variance / t_ambient**2,
    )


def two_point_variance(theta_in: float, theta_out: float, area_fraction_in: float) -> float:
    """Variance of a field taking theta_in on a fraction p of the area, theta_out elsewhere.

    Raises:
        ValueError: If the area fraction is outside [0, 1]
    """
    p = area_fraction_in
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"area fraction must lie in [0, 1], got {p}")

    return p * (1 - p) * (theta_in - theta_out) ** 2
