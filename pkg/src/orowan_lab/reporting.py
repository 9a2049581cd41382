#!/usr/bin/env python3
# this_file: src/orowan_lab/reporting.py

"""Configuration loading and CSV/JSON persistence of fields, reports and trajectories."""

from __future__ import annotations

import json
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd
from loguru import logger
from platformdirs import user_data_dir

from .models import (
    ConvergenceReport,
    Grid1D,
    MacroState,
    MicroState,
    ScalarField,
    SimulationConfig,
    Trajectory,
    ValidationReport,
)

APP_NAME = "orowan-lab"
# Decimal digits written for floats; enough to round-trip a double
FLOAT_FORMAT = "%.17g"


def dflt_output_folder(subfolder: str | Path = "runs") -> Path:
    """Get the 'runs' folder within the user's orowan-lab data directory."""
    return Path(user_data_dir(APP_NAME), subfolder)


def load_config(path: str | Path | None = None) -> SimulationConfig:
    """Parse a JSON configuration; ``None`` gives the defaults.

    Raises:
        FileNotFoundError: the file does not exist
        pydantic.ValidationError: the document violates the schema

    Used in:
    - api.py
    - cli.py
    """
    if path is None:
        return SimulationConfig()
    path = Path(path)
    if not path.is_file():
        msg = f"Config file not found: {path}"
        raise FileNotFoundError(msg)
    logger.debug(f"Loading config from {path}")
    return SimulationConfig.model_validate_json(path.read_text(encoding="utf-8"))


def write_config(config: SimulationConfig, path: str | Path) -> Path:
    """Write the configuration as JSON; load_config reads it back unchanged."""
    path = _prepare(path)
    path.write_text(config.model_dump_json(indent=2), encoding="utf-8")
    return path


def _prepare(path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(data: dict[str, Any], path: Path) -> Path:
    path.write_text(json.dumps(data, indent=2, default=_jsonable), encoding="utf-8")
    return path


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    msg = f"Cannot serialise {type(value).__name__}"
    raise TypeError(msg)


def write_table(frame: pd.DataFrame, path: str | Path) -> Path:
    """Write a table as CSV with a header row; n rows give n + 1 lines."""
    path = _prepare(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return path


def write_report(report: ValidationReport | ConvergenceReport | pd.DataFrame, path: str | Path) -> Path:
    """Write a report as CSV plus a ``.json`` manifest naming its title and columns.

    Used in:
    - tool.py
    """
    frame = report if isinstance(report, pd.DataFrame) else report.to_frame()
    path = write_table(frame, path)
    manifest: dict[str, Any] = {"columns": list(frame.columns), "rows": len(frame)}
    if isinstance(report, ValidationReport):
        manifest.update(title=report.title, passed=report.passed, failures=report.failures)
    elif isinstance(report, ConvergenceReport):
        manifest["title"] = report.title
    _write_json(manifest, path.with_suffix(".json"))
    logger.info(f"Wrote report {path}")
    return path


def _field_metadata(field: ScalarField) -> dict[str, Any]:
    grid = field.grid
    return {
        "grid": {"center": grid.center, "half_width": grid.half_width, "n": grid.n},
        "left_limit": field.left_limit,
        "right_limit": field.right_limit,
        "tail_power": field.tail_power,
        "monotone": field.monotone,
    }


def write_field(field: ScalarField, path: str | Path) -> Path:
    """Write samples as CSV ``x,value`` and the far-field metadata as a JSON sidecar."""
    path = _prepare(path)
    frame = pd.DataFrame({"x": field.nodes, "value": field.values})
    write_table(frame, path)
    _write_json(_field_metadata(field), path.with_suffix(".json"))
    return path


def read_field(path: str | Path) -> ScalarField:
    """Read a field written by write_field.

    Without a sidecar the grid is inferred from the ``x`` column, which must be uniform,
    and the limits are taken from the edge samples.

    Used in:
    - studies.py
    """
    path = Path(path)
    frame = pd.read_csv(path)
    if list(frame.columns[:2]) != ["x", "value"]:
        msg = f"Field CSV {path} must have columns x,value, got {list(frame.columns)}"
        raise ValueError(msg)
    x = frame["x"].to_numpy(dtype=float)
    values = frame["value"].to_numpy(dtype=float)
    sidecar = path.with_suffix(".json")
    if sidecar.is_file():
        meta = json.loads(sidecar.read_text(encoding="utf-8"))
        grid = Grid1D(**meta["grid"])
        if grid.n != values.size:
            msg = f"Sidecar of {path} declares {grid.n} nodes, the CSV has {values.size}"
            raise ValueError(msg)
        return ScalarField(
            grid=grid,
            values=values,
            left_limit=meta["left_limit"],
            right_limit=meta["right_limit"],
            tail_power=meta.get("tail_power"),
            monotone=bool(meta.get("monotone", False)),
        )
    spacing = np.diff(x)
    if spacing.size == 0 or not np.allclose(spacing, spacing[0], rtol=1e-9, atol=0.0):
        msg = f"Field CSV {path} needs uniformly spaced x without a sidecar"
        raise ValueError(msg)
    grid = Grid1D(0.5 * (x[0] + x[-1]), 0.5 * (x[-1] - x[0]), x.size)
    return ScalarField(grid=grid, values=values, left_limit=float(values[0]), right_limit=float(values[-1]))


def read_positions(path: str | Path) -> list[float]:
    """Initial dislocation positions from the first column of a CSV file."""
    frame = pd.read_csv(Path(path))
    if frame.empty:
        msg = f"No positions in {path}"
        raise ValueError(msg)
    return [float(v) for v in frame.iloc[:, 0].to_numpy(dtype=float)]


def snapshot_frame(states: Sequence[MicroState | MacroState]) -> pd.DataFrame:
    """Wide table: ``x`` then one ``u@t`` column per snapshot."""
    if not states:
        msg = "No snapshots to tabulate"
        raise ValueError(msg)
    columns: dict[str, np.ndarray] = {"x": states[0].u.nodes}
    for state in states:
        columns[f"u@{state.t:.6g}"] = state.u.values
    return pd.DataFrame(columns)


def write_snapshots(
    states: Sequence[MicroState | MacroState],
    folder: str | Path,
    *,
    epsilon: float | None = None,
    delta: float | None = None,
    c0: float | None = None,
) -> Path:
    """Write ``snapshot_<k>.csv`` per state and a ``manifest.json`` of times and files."""
    folder = Path(folder)
    folder.mkdir(parents=True, exist_ok=True)
    files = []
    for k, state in enumerate(states):
        name = f"snapshot_{k}.csv"
        write_field(state.u, folder / name)
        files.append(name)
    manifest = {
        "epsilon": epsilon,
        "delta": delta,
        "c0": c0,
        "times": [state.t for state in states],
        "files": files,
    }
    path = _write_json(manifest, folder / "manifest.json")
    logger.info(f"Wrote {len(files)} snapshots to {folder}")
    return path


def write_trajectory(trajectory: Trajectory, path: str | Path) -> Path:
    """Write a trajectory as CSV ``t,y_1,...,y_N``."""
    return write_table(trajectory.to_frame(), path)
