"""Utility functions for radiant-disk: number formatting and result files."""

import csv
import json
import math
from pathlib import Path
from typing import Any, Iterable, Optional

from radiant_disk import __version__

TOOL_NAME = "radiant-disk"


def format_float(value: float) -> str:
    """Format a float with full double precision, independent of locale.

    Args:
        value: Number to format

    Returns:
        17 significant digits, or "nan"/"inf"/"-inf"
    """
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return format(value, ".17g")


def format_temperature(kelvin: Optional[float]) -> str:
    """Format a temperature for console display.

    Args:
        kelvin: Temperature in K

    Returns:
        Formatted string (e.g., "318.604 K")
    """
    if kelvin is None or math.isnan(kelvin):
        return "n/a"
    return f"{kelvin:.3f} K"


def _json_ready(value: Any) -> Any:
    """Plain floats for JSON; non-finite values become strings."""
    if isinstance(value, float):
        return float(value) if math.isfinite(value) else format_float(value)
    if isinstance(value, dict):
        return {key: _json_ready(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(item) for item in value]
    return value


def build_metadata(command: str, parameters: dict[str, Any], notes: Optional[list[str]] = None) -> dict[str, Any]:
    """Metadata block embedded in every output file.

    Args:
        command: CLI subcommand that produced the file
        parameters: Effective (post-override) parameter set
        notes: Free-form remarks, e.g. which defaults were used

    Returns:
        Dictionary without timestamps or host information
    """
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": command,
        "parameters": parameters,
        "notes": notes or [],
    }


def write_json(path: Path, payload: dict[str, Any], metadata: dict[str, Any]) -> Path:
    """Write ``{"metadata": ..., **payload}`` as indented JSON.

    Args:
        path: Output file
        payload: Result fields
        metadata: Block from build_metadata

    Returns:
        The written path
    """
    document = {"metadata": metadata, **payload}
    text = json.dumps(_json_ready(document), indent=2, sort_keys=False, allow_nan=False)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text + "\n", encoding="utf-8")
    return path


def _cell(item: Any) -> str:
    if isinstance(item, bool):
        return str(item).lower()
    if isinstance(item, float):
        return format_float(item)
    return str(item)


def write_csv(
    path: Path,
    header: list[str],
    rows: Iterable[Iterable[Any]],
    metadata: dict[str, Any],
) -> Path:
    """Write a CSV file preceded by ``# key=value`` metadata lines.

    Floats are written with format_float; other values with str().

    Args:
        path: Output file
        header: Column names (the first non-comment line)
        rows: Row values
        metadata: Block from build_metadata

    Returns:
        The written path
    """
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as handle:
        for key, value in metadata.items():
            handle.write(f"# {key}={json.dumps(_json_ready(value), sort_keys=False)}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(item) for item in row])
    return path


def read_csv_rows(path: Path) -> tuple[list[str], list[list[str]]]:
    """Read back a file written by write_csv, skipping metadata lines.

    Returns:
        Header and data rows as strings
    """
    with path.open(encoding="utf-8", newline="") as handle:
        lines = [line for line in handle if not line.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, list(reader)
