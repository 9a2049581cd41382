"""Pytest configuration and fixtures for orowan_lab tests."""

import tempfile
from collections.abc import Generator
from pathlib import Path

import pytest

from orowan_lab.layer import layer_from_closed_form
from orowan_lab.models import (
    ApproxConfig,
    ConvergeConfig,
    DddConfig,
    Grid1D,
    GridConfig,
    LayerConfig,
    LayerProfile,
    MacroConfig,
    MicroConfig,
    ReconstructConfig,
    ScalarField,
    SimulationConfig,
)
from orowan_lab.potential import PotentialSpec, make_classical_potential
from orowan_lab.studies import logistic_profile


@pytest.fixture
def temp_output_dir() -> Generator[Path, None, None]:
    """Provide a temporary directory for test outputs.

    Used in:
    - tests/test_api.py
    - tests/test_cli.py
    - tests/test_reporting.py
    """
    with tempfile.TemporaryDirectory() as temp_dir:
        yield Path(temp_dir)


@pytest.fixture
def classical_potential() -> PotentialSpec:
    """Classical potential with d = 1 (α = 1, c₀ = 2π)."""
    return make_classical_potential(1.0)


@pytest.fixture
def half_potential() -> PotentialSpec:
    """Classical potential with d = 1/2: φ(1/2) = 3/4 and c₀ = π."""
    return make_classical_potential(0.5)


@pytest.fixture
def layer_grid() -> Grid1D:
    """Grid of the layer variable used by most layer tests."""
    return Grid1D(0.0, 40.0, 4096)


@pytest.fixture
def closed_form_layer(layer_grid: Grid1D) -> LayerProfile:
    """Classical layer with d = 1 sampled from its closed form.

    Used in:
    - tests/test_particles.py
    - tests/test_solvers.py
    - tests/test_studies.py
    """
    return layer_from_closed_form(1.0, layer_grid)


@pytest.fixture
def logistic_field() -> ScalarField:
    """(1 + tanh x)/2 on [-20, 20] with limits 0 and 1."""
    return logistic_profile().sample(Grid1D(0.0, 20.0, 4001))


@pytest.fixture
def quick_config() -> SimulationConfig:
    """Small configuration whose studies finish in seconds."""
    return SimulationConfig(
        layer=LayerConfig(grid=GridConfig(half_width=20.0, n=1024), tolerance=1e-6),
        micro=MicroConfig(epsilon=0.25, delta=0.25, T=0.05, half_width=4.0, points_per_layer=2.0),
        macro=MacroConfig(grid=GridConfig(half_width=10.0, n=256), T=0.1),
        ddd=DddConfig(positions=[-0.5, 0.5], dt=1e-3, T=0.2),
        approx=ApproxConfig(epsilons=[4e-2, 1e-2], n_probes=20, n=2048),
        reconstruct=ReconstructConfig(pairs=[(0.2, 0.2), (0.1, 0.1)]),
        converge=ConvergeConfig(epsilons=[0.25], T=0.05),
    )
