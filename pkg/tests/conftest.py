"""Shared fixtures."""

import json

import pytest

from radiant_disk.models import DiskParams
from radiant_disk.solver1d import solve_reduced

REFERENCE_DISK = {
    "r": 0.1,
    "h": 0.001,
    "k": 10.0,
    "emissivity": 0.8,
    "q0": 1e9,
    "a": 0.001,
    "t_ambient": 300.0,
}


@pytest.fixture
def reference_data():
    """Raw reference-disk parameters, config-key form."""
    return dict(REFERENCE_DISK)


@pytest.fixture
def reference_params():
    """Validated reference-disk parameters."""
    return DiskParams(**REFERENCE_DISK)


@pytest.fixture(scope="session")
def reference_solution():
    """Converged reduced solve of the reference disk at the default resolution."""
    params = DiskParams(**REFERENCE_DISK)
    field, report = solve_reduced(params)
    return params, field, report


@pytest.fixture
def write_config(tmp_path):
    """Write a run configuration JSON and return its path."""

    def _write(disk=None, name="config.json", **sections):
        document = {"disk": dict(REFERENCE_DISK, **(disk or {}))}
        document.update(sections)
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return _write
