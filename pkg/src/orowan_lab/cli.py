#!/usr/bin/env python3
# this_file: src/orowan_lab/cli.py

"""CLI interface for orowan-lab."""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import fire
from loguru import logger

from .api import run_study
from .models import StudyName
from .reporting import dflt_output_folder


class OrowanLabCLI:
    """Fire CLI: one command per study, each taking ``--config`` and ``--out``.

    The process exits with status 1 when any acceptance gate of the study fails.

    Used in:
    - __init__.py
    - __main__.py
    """

    def __init__(self, *, verbose: bool = False, json: bool = False, output_dir: str | Path | None = None) -> None:
        """Initialize CLI with common parameters.

        Args:
            verbose: Enable debug logging
            json: Output the summary as JSON
            output_dir: Default output folder when ``--out`` is not given

        """
        self.verbose = verbose
        self.json = json
        self.output_dir = Path(output_dir) if output_dir is not None else dflt_output_folder()
        logger.remove()
        logger.add(sys.stderr, level="DEBUG" if verbose else "ERROR")

    def _run(self, study: StudyName, config: str | None, out: str | None) -> dict[str, Any] | str:
        folder = Path(out) if out is not None else self.output_dir / study.value
        try:
            summary = run_study(study, config, folder, verbose=self.verbose)
        except Exception as e:
            if self.json:
                print(json.dumps({"study": study.value, "error": str(e)}))
            logger.error(f"Study {study.value} failed: {e}")
            raise
        if not summary["passed"]:
            print(json.dumps(summary, indent=2) if self.json else summary)
            raise SystemExit(1)
        return json.dumps(summary, indent=2) if self.json else summary

    def layer(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Solve the transition layer and corrector and check their tails."""
        return self._run(StudyName.LAYER, config, out)

    def c0(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Compute the mobility constant c₀."""
        return self._run(StudyName.C0, config, out)

    def micro(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Run the microscopic model and write snapshots."""
        return self._run(StudyName.MICRO, config, out)

    def macro(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Run the macroscopic model and write snapshots."""
        return self._run(StudyName.MACRO, config, out)

    def ddd(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Integrate the discrete dislocation dynamics and write the trajectory."""
        return self._run(StudyName.DDD, config, out)

    def approx(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Particle-sum approximation of I₁ along the ε sweep."""
        return self._run(StudyName.APPROX, config, out)

    def reconstruct(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Layered reconstruction error along the (ε, δ) sweep."""
        return self._run(StudyName.RECONSTRUCT, config, out)

    def converge(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Micro-to-macro convergence along the ε sweep."""
        return self._run(StudyName.CONVERGE, config, out)

    def orowan(self, config: str | None = None, out: str | None = None) -> dict[str, Any] | str:
        """Level-point velocities against -c₀ I₁[ū]."""
        return self._run(StudyName.OROWAN, config, out)


def main():
    """Main CLI entry point."""
    fire.Fire(OrowanLabCLI)


if __name__ == "__main__":
    main()
