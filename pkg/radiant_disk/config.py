"""Configuration management."""

import json
import os
from pathlib import Path
from typing import Any, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from radiant_disk.exceptions import ConfigError
from radiant_disk.models import DiskParams, SweepSpec

OUTPUT_FORMATS = ("csv", "json")


def load_config():
    """Load environment defaults from a .env file if it exists."""
    # Try to find .env in current directory first
    env_file = Path.cwd() / ".env"
    if env_file.exists():
        load_dotenv(env_file, override=True)
    else:
        load_dotenv(override=True)

    return {
        "config_path": os.getenv("RADIANT_DISK_CONFIG"),
        "output_dir": os.getenv("RADIANT_DISK_OUT"),
    }


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SolverSettings(_Section):
    n_cells: int = Field(2000, ge=8)
    tol: Optional[float] = Field(None, gt=0)  # None: 1e-8 * alpha * Ta^4
    max_iter: int = Field(50, ge=1)


class Solver2DSettings(_Section):
    nr: int = Field(800, ge=8)
    nz: int = Field(10, ge=3)


class SweepSettings(_Section):
    q0_min: float = 1e6
    q0_max: float = 1e9
    n_points: int = 25
    log_spacing: bool = True
    include_zero: bool = False
    workers: int = Field(1, ge=1)

    @property
    def is_default_grid(self) -> bool:
        return (self.q0_min, self.q0_max, self.n_points, self.log_spacing) == (
            1e6, 1e9, 25, True,
        )


class ConvergenceSettings(_Section):
    n_base: int = Field(250, ge=50)
    linearized: bool = False


class OutputSettings(_Section):
    directory: Path = Path("results")
    formats: list[str] = Field(default_factory=lambda: list(OUTPUT_FORMATS))

    @field_validator("formats")
    @classmethod
    def _known_formats(cls, formats: list[str]) -> list[str]:
        unknown = sorted(set(formats) - set(OUTPUT_FORMATS))
        if unknown:
            raise ValueError(f"unsupported output format(s): {', '.join(unknown)}")
        return formats


class RunConfig(_Section):
    """Everything a command needs: disk, numerics, studies and output."""

    disk: DiskParams
    solver: SolverSettings = Field(default_factory=SolverSettings)
    solver2d: Solver2DSettings = Field(default_factory=Solver2DSettings)
    sweep: SweepSettings = Field(default_factory=SweepSettings)
    convergence: ConvergenceSettings = Field(default_factory=ConvergenceSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)

    def sweep_spec(self) -> SweepSpec:
        """Combine the sweep section with the disk and solver sections."""
        return SweepSpec(
            q0_min=self.sweep.q0_min,
            q0_max=self.sweep.q0_max,
            n_points=self.sweep.n_points,
            log_spacing=self.sweep.log_spacing,
            include_zero=self.sweep.include_zero,
            base=self.disk,
            n_cells=self.solver.n_cells,
            tol=self.solver.tol,
            max_iter=self.solver.max_iter,
            workers=self.sweep.workers,
        )

    def effective(self) -> dict[str, Any]:
        """JSON-ready dump with config key names, for output metadata."""
        return self.model_dump(mode="json", by_alias=True, exclude={"output"})


# Override name -> (section, key). Applied in the order given.
OVERRIDE_KEYS = {
    "q0": ("disk", "q0"),
    "n_cells": ("solver", "n_cells"),
    "tol": ("solver", "tol"),
    "max_iter": ("solver", "max_iter"),
    "nr": ("solver2d", "nr"),
    "nz": ("solver2d", "nz"),
    "n_base": ("convergence", "n_base"),
    "workers": ("sweep", "workers"),
    "out": ("output", "directory"),
    "formats": ("output", "formats"),
}


def read_config_file(path: Path) -> dict[str, Any]:
    """Read the raw JSON document of a run configuration.

    Raises:
        ConfigError: If the file is missing or is not a JSON object
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"config file {path} must contain a JSON object")
    return data


def apply_overrides(data: dict[str, Any], overrides: list[tuple[str, Any]]) -> dict[str, Any]:
    """Layer CLI overrides over raw config data, left to right.

    Raises:
        ConfigError: If an override name is unknown
    """
    merged = {section: dict(values) if isinstance(values, dict) else values
              for section, values in data.items()}
    for name, value in overrides:
        if name not in OVERRIDE_KEYS:
            raise ConfigError(f"unknown override: {name}")
        section, key = OVERRIDE_KEYS[name]
        merged.setdefault(section, {})[key] = value
    return merged


def load_run_config(
    path: Path,
    overrides: Optional[list[tuple[str, Any]]] = None,
) -> RunConfig:
    """Read, override and validate a run configuration.

    Raises:
        ConfigError: On a missing file, bad JSON or any invalid value
    """
    data = apply_overrides(read_config_file(path), overrides or [])
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"invalid configuration in {path}:\n{e}") from e
