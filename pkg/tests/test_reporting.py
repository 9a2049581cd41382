"""Tests for orowan_lab.reporting module."""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

from orowan_lab.models import (
    ConvergenceReport,
    ConvergenceRow,
    Grid1D,
    MicroState,
    ScalarField,
    SimulationConfig,
    Trajectory,
    ValidationReport,
)
from orowan_lab.reporting import (
    dflt_output_folder,
    load_config,
    read_field,
    read_positions,
    snapshot_frame,
    write_config,
    write_field,
    write_report,
    write_snapshots,
    write_trajectory,
)


class TestConfigFiles:
    """Test load_config and write_config."""

    def test_defaults_without_path(self) -> None:
        """Test that no path gives the default configuration."""
        assert load_config(None) == SimulationConfig()

    def test_missing_file(self, temp_output_dir: Path) -> None:
        """Test that a missing file is reported."""
        with pytest.raises(FileNotFoundError, match="Config file not found"):
            load_config(temp_output_dir / "absent.json")

    def test_round_trip(self, temp_output_dir: Path, quick_config: SimulationConfig) -> None:
        """Test that a written configuration reads back unchanged."""
        path = write_config(quick_config, temp_output_dir / "sub" / "config.json")

        assert path.is_file()
        assert load_config(path) == quick_config

    def test_unknown_key(self, temp_output_dir: Path) -> None:
        """Test that unknown keys are rejected."""
        path = temp_output_dir / "bad.json"
        path.write_text(json.dumps({"micro": {"epsilon": 0.1, "speed": 3}}), encoding="utf-8")

        with pytest.raises(ValidationError):
            load_config(path)

    def test_default_output_folder(self) -> None:
        """Test the default output folder name."""
        assert dflt_output_folder().name == "runs"
        assert dflt_output_folder("x").name == "x"


class TestWriteReport:
    """Test write_report."""

    def test_validation_report(self, temp_output_dir: Path) -> None:
        """Test that n rows give n + 1 CSV lines and a manifest."""
        report = ValidationReport("demo")
        report.add("a", 1.0, 2.0, passed=True)
        report.add("b", 3.0, 2.0, passed=False, note="too large")
        report.add("c", 0.5, 1.0, passed=True)

        path = write_report(report, temp_output_dir / "demo.csv")
        manifest = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))

        assert len(path.read_text(encoding="utf-8").splitlines()) == 4
        assert manifest["title"] == "demo"
        assert manifest["passed"] is False
        assert manifest["failures"] == ["b"]
        assert manifest["columns"] == ["label", "value", "threshold", "passed", "note"]

    def test_convergence_report(self, temp_output_dir: Path) -> None:
        """Test the columns of a convergence table."""
        report = ConvergenceReport("sweep", [ConvergenceRow(epsilon=0.1, delta=0.1, error=0.01, extras={"n": 64.0})])

        path = write_report(report, temp_output_dir / "sweep.csv")
        frame = pd.read_csv(path)

        assert list(frame.columns[:3]) == ["epsilon", "delta", "error"]
        assert frame["n"].iloc[0] == 64.0

    def test_dataframe(self, temp_output_dir: Path) -> None:
        """Test that plain tables get a manifest without a title."""
        path = write_report(pd.DataFrame({"x": [1.0, 2.0]}), temp_output_dir / "plain.csv")
        manifest = json.loads(path.with_suffix(".json").read_text(encoding="utf-8"))

        assert manifest == {"columns": ["x"], "rows": 2}

    def test_floats_round_trip(self, temp_output_dir: Path) -> None:
        """Test that written floats read back bitwise."""
        value = 1.0 / 3.0
        path = write_report(pd.DataFrame({"v": [value]}), temp_output_dir / "v.csv")

        assert pd.read_csv(path)["v"].iloc[0] == value


class TestFieldFiles:
    """Test write_field and read_field."""

    def test_with_sidecar(self, temp_output_dir: Path) -> None:
        """Test that the sidecar restores the far-field metadata."""
        grid = Grid1D(1.0, 3.0, 32)
        field = ScalarField(grid, np.arctan(grid.nodes), -1.5, 1.5, tail_power=1.0, monotone=True)

        loaded = read_field(write_field(field, temp_output_dir / "f.csv"))

        assert loaded.grid == grid
        assert np.array_equal(loaded.values, field.values)
        assert loaded.left_limit == -1.5
        assert loaded.tail_power == 1.0
        assert loaded.monotone

    def test_without_sidecar(self, temp_output_dir: Path) -> None:
        """Test that a bare CSV gives a uniform grid and edge limits."""
        path = temp_output_dir / "bare.csv"
        pd.DataFrame({"x": np.linspace(-2.0, 2.0, 9), "value": np.linspace(0.0, 1.0, 9)}).to_csv(path, index=False)

        loaded = read_field(path)

        assert loaded.grid.n == 9
        assert loaded.grid.half_width == pytest.approx(2.0)
        assert loaded.right_limit == 1.0
        assert loaded.tail_power is None

    def test_non_uniform(self, temp_output_dir: Path) -> None:
        """Test that irregular samples need a sidecar."""
        path = temp_output_dir / "irregular.csv"
        pd.DataFrame({"x": [0.0, 1.0, 3.0, 4.0], "value": [0.0, 0.1, 0.2, 0.3]}).to_csv(path, index=False)

        with pytest.raises(ValueError, match="uniformly spaced"):
            read_field(path)

    def test_wrong_columns(self, temp_output_dir: Path) -> None:
        """Test the column check."""
        path = temp_output_dir / "cols.csv"
        pd.DataFrame({"t": [0.0, 1.0], "u": [0.0, 1.0]}).to_csv(path, index=False)

        with pytest.raises(ValueError, match="columns x,value"):
            read_field(path)


class TestPositions:
    """Test read_positions."""

    def test_first_column(self, temp_output_dir: Path) -> None:
        """Test that the first column holds the positions."""
        path = temp_output_dir / "y.csv"
        pd.DataFrame({"y": [-1.0, 0.5], "label": ["a", "b"]}).to_csv(path, index=False)

        assert read_positions(path) == [-1.0, 0.5]

    def test_empty(self, temp_output_dir: Path) -> None:
        """Test that a header-only file is rejected."""
        path = temp_output_dir / "empty.csv"
        path.write_text("y\n", encoding="utf-8")

        with pytest.raises(ValueError, match="No positions"):
            read_positions(path)


class TestSnapshots:
    """Test snapshot_frame, write_snapshots and write_trajectory."""

    def test_frame(self, logistic_field: ScalarField) -> None:
        """Test one column per snapshot."""
        states = [MicroState(logistic_field, 0.1, 0.1, t) for t in (0.0, 0.5)]

        frame = snapshot_frame(states)

        assert list(frame.columns) == ["x", "u@0", "u@0.5"]
        assert len(frame) == logistic_field.grid.n

    def test_frame_empty(self) -> None:
        """Test that at least one snapshot is needed."""
        with pytest.raises(ValueError, match="No snapshots"):
            snapshot_frame([])

    def test_manifest(self, temp_output_dir: Path, logistic_field: ScalarField) -> None:
        """Test the snapshot manifest."""
        states = [MicroState(logistic_field, 0.1, 0.2, t) for t in (0.0, 0.5)]

        path = write_snapshots(states, temp_output_dir / "snaps", epsilon=0.1, delta=0.2)
        manifest = json.loads(path.read_text(encoding="utf-8"))

        assert manifest["times"] == [0.0, 0.5]
        assert manifest["files"] == ["snapshot_0.csv", "snapshot_1.csv"]
        assert manifest["delta"] == 0.2
        assert manifest["c0"] is None
        assert read_field(temp_output_dir / "snaps" / "snapshot_1.csv").grid == logistic_field.grid

    def test_trajectory(self, temp_output_dir: Path) -> None:
        """Test the trajectory columns."""
        trajectory = Trajectory(np.array([0.0, 1.0]), np.array([[-0.5, 0.5], [-1.0, 1.0]]))

        frame = pd.read_csv(write_trajectory(trajectory, temp_output_dir / "traj.csv"))

        assert list(frame.columns) == ["t", "y_1", "y_2"]
        assert frame["y_2"].tolist() == [0.5, 1.0]
