#!/usr/bin/env python3
# this_file: src/orowan_lab/tool.py

"""Orchestrator running one study from a configuration and writing its outputs."""

from __future__ import annotations

from functools import cached_property
from pathlib import Path
from typing import Any

from loguru import logger

from . import studies
from .layer import solve_layer_profile
from .models import Grid1D, LayerProfile, SimulationConfig, StudyName, StudyResult, Trajectory
from .potential import PotentialSpec, potential_from_config
from .reporting import dflt_output_folder, write_config, write_field, write_report, write_snapshots, write_trajectory


class OrowanLabTool:
    """Runs harness studies with a shared potential and a cached layer.

    Used in:
    - __init__.py
    - api.py
    """

    def __init__(self, config: SimulationConfig | None = None, *, verbose: bool = False) -> None:
        """Initialize the tool.

        Args:
            config: Validated configuration (defaults when omitted)
            verbose: Enable debug logging

        """
        self.config = config or SimulationConfig()
        self.verbose = verbose

    @cached_property
    def potential(self) -> PotentialSpec:
        return potential_from_config(self.config.potential)

    def solve_layer(self, grid: Grid1D) -> LayerProfile:
        """Layer profile of the configured potential on ``grid``."""
        settings = self.config.layer
        return solve_layer_profile(
            self.potential,
            grid,
            tolerance=settings.tolerance,
            max_sweeps=settings.max_sweeps,
            relaxation=settings.relaxation,
        )

    @cached_property
    def layer(self) -> LayerProfile:
        layer = self.solve_layer(self.config.layer.grid.to_grid())
        logger.info(f"Layer solved in {layer.sweeps} sweeps: c0={layer.c0:.10g}, residual {layer.residual:.3e}")
        return layer

    def run(self, study: StudyName | str) -> StudyResult:
        """Run one study and return its tables and gates.

        Raises:
            ValueError: unknown study or infeasible configuration
            RuntimeError: a solver failed to converge

        Used in:
        - api.py
        """
        study = StudyName(study)
        config, p = self.config, self.potential
        logger.info(f"Running study {study.value}")
        if study is StudyName.LAYER:
            return studies.run_layer_study(config, p, self.layer)
        if study is StudyName.C0:
            return studies.run_c0_study(p, self.layer, self.solve_layer)
        if study is StudyName.MICRO:
            return studies.run_micro_study(config, p, self.layer)
        if study is StudyName.MACRO:
            return studies.run_macro_study(config, self.layer)
        if study is StudyName.DDD:
            return studies.run_ddd_study(config, p, self.layer)
        if study is StudyName.APPROX:
            return studies.run_particle_approx_study(config)
        if study is StudyName.RECONSTRUCT:
            return studies.run_reconstruction_study(config, self.layer)
        if study is StudyName.CONVERGE:
            return studies.run_multiscale_convergence(config, p, self.layer)
        return studies.run_orowan_check(config, self.layer)

    def write(self, result: StudyResult, output_dir: str | Path | None = None) -> dict[str, Any]:
        """Write tables, gates, fields, snapshots and trajectories; return a JSON-ready summary.

        Used in:
        - api.py
        """
        folder = Path(output_dir) if output_dir is not None else dflt_output_folder() / result.name
        folder.mkdir(parents=True, exist_ok=True)
        files = [
            write_config(self.config, folder / "config.json"),
            write_report(result.table, folder / f"{result.name}.csv"),
            write_report(result.gates, folder / f"{result.name}_gates.csv"),
        ]
        for name, table in result.tables.items():
            files.append(write_report(table, folder / f"{name}.csv"))
        for name, field in result.fields.items():
            files.append(write_field(field, folder / "fields" / f"{name}.csv"))

        snapshots = result.summary.get("snapshots")
        if snapshots:
            files.append(
                write_snapshots(
                    snapshots,
                    folder / "snapshots",
                    epsilon=result.summary.get("epsilon"),
                    delta=result.summary.get("delta"),
                    c0=result.summary.get("c0"),
                )
            )
        trajectory = result.summary.get("trajectory")
        if isinstance(trajectory, Trajectory):
            files.append(write_trajectory(trajectory, folder / "trajectory.csv"))

        scalars = {
            key: value for key, value in result.summary.items() if isinstance(value, (bool, int, float, str))
        }
        if not result.passed:
            logger.error(f"Study {result.name} failed gates: {', '.join(result.gates.failures)}")
        return {
            "study": result.name,
            "passed": result.passed,
            "failures": result.gates.failures,
            "output_dir": str(folder),
            "files": [str(path) for path in files],
            "summary": scalars,
        }
