#!/usr/bin/env python3
# this_file: src/orowan_lab/__init__.py

"""Multiscale dislocation dynamics: Peierls-Nabarro layers, particle sums and Orowan-law limits."""

from .api import (
    run_approx,
    run_c0,
    run_converge,
    run_ddd,
    run_layer,
    run_macro,
    run_micro,
    run_orowan,
    run_reconstruct,
    run_study,
)
from .cli import OrowanLabCLI
from .models import Grid1D, ScalarField, SimulationConfig, StudyName
from .tool import OrowanLabTool

try:
    from .__version__ import __version__
except ImportError:
    # Fallback version if __version__.py is not available
    __version__ = "0.0.0+unknown"
__all__ = [
    "Grid1D",
    "OrowanLabCLI",
    "OrowanLabTool",
    "ScalarField",
    "SimulationConfig",
    "StudyName",
    "run_approx",
    "run_c0",
    "run_converge",
    "run_ddd",
    "run_layer",
    "run_macro",
    "run_micro",
    "run_orowan",
    "run_reconstruct",
    "run_study",
]
