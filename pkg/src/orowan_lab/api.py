#!/usr/bin/env python3
# this_file: src/orowan_lab/api.py

"""Public API for orowan-lab - one entry point per harness study."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated, Any

from pydantic import Field

from .models import SimulationConfig, StudyName
from .reporting import dflt_output_folder, load_config
from .tool import OrowanLabTool

ConfigArg = Annotated[
    str | Path | SimulationConfig | None,
    Field(default=None, description="JSON config file or a validated config (None: defaults)"),
]
OutputArg = Annotated[
    str | Path | None,
    Field(default_factory=lambda: dflt_output_folder(), description="Output directory for CSV and JSON files"),
]


def _resolve(config: str | Path | SimulationConfig | None) -> SimulationConfig:
    if isinstance(config, SimulationConfig):
        return config
    return load_config(config)


def run_study(
    study: Annotated[StudyName | str, Field(description="Study to run")],
    config: ConfigArg = None,
    output_dir: OutputArg = None,
    *,
    verbose: Annotated[bool, Field(default=False, description="Enable debug logging")] = False,
) -> dict[str, Any]:
    """Run one study, write its outputs and return the summary.

    Args:
        study: layer, c0, micro, macro, ddd, approx, reconstruct, converge or orowan
        config: JSON config path, a SimulationConfig, or None for defaults
        output_dir: Folder for the outputs (default: user data folder / runs / study)
        verbose: Enable debug logging

    Returns:
        {"study", "passed", "failures", "output_dir", "files", "summary"}

    Raises:
        ValueError: unknown study or infeasible configuration
        pydantic.ValidationError: invalid config document

    Used in:
    - __init__.py
    - cli.py
    """
    study = StudyName(study)
    tool = OrowanLabTool(_resolve(config), verbose=verbose)
    result = tool.run(study)
    folder = Path(output_dir) if output_dir is not None else dflt_output_folder() / study.value
    return tool.write(result, folder)


def run_layer(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    """Solve the layer and corrector and check their tails."""
    return run_study(StudyName.LAYER, config, output_dir)


def run_c0(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    """Mobility constant c₀ with a grid-refinement check."""
    return run_study(StudyName.C0, config, output_dir)


def run_micro(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    return run_study(StudyName.MICRO, config, output_dir)


def run_macro(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    return run_study(StudyName.MACRO, config, output_dir)


def run_ddd(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    """Discrete dislocation dynamics, optionally against the micro model."""
    return run_study(StudyName.DDD, config, output_dir)


def run_approx(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    return run_study(StudyName.APPROX, config, output_dir)


def run_reconstruct(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    return run_study(StudyName.RECONSTRUCT, config, output_dir)


def run_converge(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    """Micro-to-macro convergence along the ε sweep."""
    return run_study(StudyName.CONVERGE, config, output_dir)


def run_orowan(config: ConfigArg = None, output_dir: OutputArg = None) -> dict[str, Any]:
    return run_study(StudyName.OROWAN, config, output_dir)
