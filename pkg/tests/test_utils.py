"""Tests for utility functions."""

import json

from radiant_disk import __version__
from radiant_disk.utils import (
    build_metadata,
    format_float,
    format_temperature,
    read_csv_rows,
    write_csv,
    write_json,
)


def test_format_float_round_trips():
    """Test floats keep full precision."""
    assert format_float(0.1) == "0.10000000000000001"
    assert float(format_float(318.60412345678)) == 318.60412345678
    assert format_float(1e9) == "1000000000"
    assert format_float(300) == "300"


def test_format_float_non_finite():
    """Test NaN and infinities get plain spellings."""
    assert format_float(float("nan")) == "nan"
    assert format_float(float("inf")) == "inf"
    assert format_float(float("-inf")) == "-inf"


def test_format_temperature():
    """Test console temperature formatting."""
    assert format_temperature(318.6041) == "318.604 K"
    assert format_temperature(300) == "300.000 K"
    assert format_temperature(float("nan")) == "n/a"
    assert format_temperature(None) == "n/a"


def test_build_metadata():
    """Test the metadata block carries tool, version, command and parameters only."""
    metadata = build_metadata("solve", {"disk": {"q0": 1e9}}, ["a note"])

    assert metadata == {
        "tool": "radiant-disk",
        "version": __version__,
        "command": "solve",
        "parameters": {"disk": {"q0": 1e9}},
        "notes": ["a note"],
    }
    assert build_metadata("sweep", {})["notes"] == []


def test_write_json(tmp_path):
    """Test JSON output puts metadata first and spells NaN as a string."""
    metadata = build_metadata("sweep", {"n": 1})
    path = write_json(tmp_path / "nested" / "out.json", {"value": 1.5, "bad": float("nan")}, metadata)

    document = json.loads(path.read_text(encoding="utf-8"))

    assert list(document) == ["metadata", "value", "bad"]
    assert document["metadata"]["command"] == "sweep"
    assert document["value"] == 1.5
    assert document["bad"] == "nan"


def test_write_csv_layout(tmp_path):
    """Test CSV output: metadata comments, then the header, then formatted rows."""
    metadata = build_metadata("solve", {"disk": {"q0": 0.0}})
    path = write_csv(
        tmp_path / "profile.csv",
        ["r_m", "T_K", "converged"],
        [(0.1, 300.0, True), (0.2, float("nan"), False)],
        metadata,
    )

    lines = path.read_text(encoding="utf-8").splitlines()

    assert lines[0] == '# tool="radiant-disk"'
    assert lines[2] == '# command="solve"'
    assert lines[3] == '# parameters={"disk": {"q0": 0.0}}'
    assert lines[5] == "r_m,T_K,converged"
    assert lines[6] == "0.10000000000000001,300,true"
    assert lines[7] == "0.20000000000000001,nan,false"


def test_read_csv_rows_skips_metadata(tmp_path):
    """Test reading back a written CSV returns header and rows only."""
    metadata = build_metadata("solve", {})
    path = write_csv(tmp_path / "a.csv", ["x", "y"], [(1.0, 2.0), (3.0, 4.5)], metadata)

    header, rows = read_csv_rows(path)

    assert header == ["x", "y"]
    assert rows == [["1", "2"], ["3", "4.5"]]


def test_writers_are_deterministic(tmp_path):
    """Test writing the same content twice gives identical bytes."""
    metadata = build_metadata("solve", {"q0": 1e9})
    first = write_csv(tmp_path / "a.csv", ["x"], [(0.3,)], metadata)
    second = write_csv(tmp_path / "b.csv", ["x"], [(0.3,)], metadata)

    assert first.read_bytes() == second.read_bytes()
