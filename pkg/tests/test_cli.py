"""Tests for orowan_lab.cli module."""

import json
from pathlib import Path
from unittest.mock import MagicMock, patch

import pytest

from orowan_lab.cli import OrowanLabCLI
from orowan_lab.models import StudyName


class TestOrowanLabCLI:
    """Test the OrowanLabCLI class."""

    def test_cli_initialization_defaults(self) -> None:
        """Test CLI initialization with default parameters."""
        cli = OrowanLabCLI()

        assert cli.verbose is False
        assert cli.json is False
        assert cli.output_dir.name == "runs"

    def test_cli_initialization_custom(self, temp_output_dir: Path) -> None:
        """Test CLI initialization with custom parameters."""
        cli = OrowanLabCLI(verbose=True, json=True, output_dir=temp_output_dir)

        assert cli.verbose is True
        assert cli.json is True
        assert cli.output_dir == temp_output_dir

    @patch("orowan_lab.cli.run_study")
    def test_passing_study(self, mock_run: MagicMock, temp_output_dir: Path) -> None:
        """Test that a passing study returns its summary."""
        mock_run.return_value = {"study": "c0", "passed": True}
        cli = OrowanLabCLI()

        result = cli.c0(config="cfg.json", out=str(temp_output_dir))

        assert result == {"study": "c0", "passed": True}
        mock_run.assert_called_once_with(StudyName.C0, "cfg.json", temp_output_dir, verbose=False)

    @patch("orowan_lab.cli.run_study")
    def test_default_out(self, mock_run: MagicMock, temp_output_dir: Path) -> None:
        """Test that each study writes into its own subfolder by default."""
        mock_run.return_value = {"passed": True}
        cli = OrowanLabCLI(output_dir=temp_output_dir)

        cli.orowan()

        assert mock_run.call_args.args[2] == temp_output_dir / "orowan"

    @patch("orowan_lab.cli.run_study")
    def test_json_output(self, mock_run: MagicMock) -> None:
        """Test the JSON rendering of the summary."""
        mock_run.return_value = {"study": "ddd", "passed": True, "files": []}
        cli = OrowanLabCLI(json=True)

        result = cli.ddd()

        assert json.loads(result) == {"study": "ddd", "passed": True, "files": []}

    @patch("orowan_lab.cli.run_study")
    def test_failed_gates_exit_code(self, mock_run: MagicMock, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that failing gates exit with status 1 after printing the summary."""
        mock_run.return_value = {"study": "micro", "passed": False, "failures": ["monotone"]}
        cli = OrowanLabCLI(json=True)

        with pytest.raises(SystemExit) as excinfo:
            cli.micro()

        assert excinfo.value.code == 1
        assert json.loads(capsys.readouterr().out)["failures"] == ["monotone"]

    @patch("orowan_lab.cli.run_study")
    def test_error_propagates(self, mock_run: MagicMock, capsys: pytest.CaptureFixture[str]) -> None:
        """Test that solver errors are reported and re-raised."""
        mock_run.side_effect = RuntimeError("did not converge")
        cli = OrowanLabCLI(json=True)

        with pytest.raises(RuntimeError, match="did not converge"):
            cli.layer()

        assert json.loads(capsys.readouterr().out) == {"study": "layer", "error": "did not converge"}

    @pytest.mark.parametrize("study", list(StudyName))
    def test_every_study_has_a_command(self, study: StudyName) -> None:
        """Test that each study is exposed as a command."""
        assert callable(getattr(OrowanLabCLI, study.value))
