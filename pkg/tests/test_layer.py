"""Tests for orowan_lab.layer module."""

import math

import numpy as np
import pytest

from orowan_lab.layer import (
    compute_c0,
    layer_from_closed_form,
    nabarro_closed_form,
    solve_corrector,
    solve_layer_profile,
    verify_corrector_tails,
    verify_layer_tails,
)
from orowan_lab.models import Grid1D, LayerProfile, ScalarField
from orowan_lab.potential import PotentialSpec, make_cosine_potential


class TestClosedForm:
    """Test the classical closed-form layer."""

    def test_values(self) -> None:
        """Test φ_d(0) = 1/2 and φ_{1/2}(1/2) = 3/4."""
        assert nabarro_closed_form(1.0, 0.0) == 0.5
        assert nabarro_closed_form(0.5, 0.5) == pytest.approx(0.75, abs=1e-15)

    def test_non_positive_spacing(self) -> None:
        """Test that d must be positive."""
        with pytest.raises(ValueError, match="must be positive"):
            nabarro_closed_form(0.0, 1.0)

    @pytest.mark.parametrize("d", [0.5, 1.0, 2.0])
    def test_mobility(self, d: float, layer_grid: Grid1D) -> None:
        """Test c₀ = 2πd from the sampled closed form."""
        layer = layer_from_closed_form(d, layer_grid)

        assert layer.c0 == pytest.approx(2.0 * math.pi * d, rel=1e-3)
        assert compute_c0(layer) == layer.c0
        assert layer.alpha == pytest.approx(1.0 / d)

    def test_tails_pass(self, closed_form_layer: LayerProfile) -> None:
        """Test the tail report of the closed form."""
        report = verify_layer_tails(closed_form_layer)

        assert report.passed
        assert report.row("K0").value > 0
        assert report.row("centred").value <= 1e-8

    def test_flat_field_is_not_a_layer(self, layer_grid: Grid1D) -> None:
        """Test that a constant profile fails the is-layer row without raising."""
        flat = ScalarField(layer_grid, np.full(layer_grid.n, 0.5), 0.5, 0.5)
        zero = flat.with_values(np.zeros(layer_grid.n))
        layer = LayerProfile(field=flat, derivative=zero, alpha=1.0, c0=1.0, tail_constant_k1=0.0)

        report = verify_layer_tails(layer)

        assert not report.passed
        assert report.failures == ["is-layer"]

    def test_half_spacing_potential(self, half_potential: PotentialSpec) -> None:
        """Test that d = 1/2 gives α = 2 and c₀ = π."""
        layer = layer_from_closed_form(0.5, Grid1D(0.0, 20.0, 2048))

        assert layer.alpha == pytest.approx(half_potential.alpha)
        assert layer.c0 == pytest.approx(math.pi, rel=1e-3)


class TestSolveLayerProfile:
    """Test solve_layer_profile."""

    def test_classical_matches_closed_form(self, classical_potential: PotentialSpec) -> None:
        """Test that the relaxed layer stays close to φ_d and has c₀ ≈ 2π."""
        grid = Grid1D(0.0, 20.0, 1024)

        layer = solve_layer_profile(classical_potential, grid, tolerance=1e-6)
        window = np.abs(grid.nodes) <= 10.0
        exact = np.asarray(nabarro_closed_form(1.0, grid.nodes))

        assert layer.residual < 1e-6
        assert np.max(np.abs(layer.field.values[window] - exact[window])) < 5e-3
        assert layer.c0 == pytest.approx(2.0 * math.pi, rel=1e-2)
        assert verify_layer_tails(layer).passed

    def test_two_mode_potential(self) -> None:
        """Test a non-classical potential: monotone, centred, limits 0 and 1."""
        p = make_cosine_potential([1.0 / (4.0 * math.pi**2), 0.002])
        grid = Grid1D(0.0, 20.0, 1024)

        layer = solve_layer_profile(p, grid, tolerance=1e-6)

        assert verify_layer_tails(layer).passed
        assert layer.alpha == pytest.approx(p.alpha)
        assert layer.field.values[0] < 0.05
        assert layer.field.values[-1] > 0.95

    def test_rejects_invalid_potential(self) -> None:
        """Test that inadmissible potentials are refused."""
        with pytest.raises(ValueError, match="Potential rejected"):
            solve_layer_profile(make_cosine_potential([1.0, -1.0]), Grid1D(0.0, 20.0, 256))

    def test_grid_must_contain_origin(self, classical_potential: PotentialSpec) -> None:
        """Test the grid check."""
        with pytest.raises(ValueError, match="must contain the origin"):
            solve_layer_profile(classical_potential, Grid1D(10.0, 5.0, 64))

    def test_not_converged(self, classical_potential: PotentialSpec) -> None:
        """Test the sweep limit."""
        with pytest.raises(RuntimeError, match="did not converge"):
            solve_layer_profile(classical_potential, Grid1D(0.0, 20.0, 256), tolerance=1e-14, max_sweeps=1)


class TestCorrector:
    """Test solve_corrector and verify_corrector_tails."""

    @pytest.fixture
    def small_layer(self) -> LayerProfile:
        """Closed-form layer on a coarse grid."""
        return layer_from_closed_form(1.0, Grid1D(0.0, 20.0, 512))

    def test_zero_stress(self, classical_potential: PotentialSpec, small_layer: LayerProfile) -> None:
        """Test that L = 0 gives ψ = 0 without sweeps."""
        corrector = solve_corrector(classical_potential, small_layer, 0.0)

        assert corrector.sweeps == 0
        assert np.all(corrector.field.values == 0.0)

    @pytest.mark.slow
    def test_linear_in_stress(self, classical_potential: PotentialSpec, small_layer: LayerProfile) -> None:
        """Test ψ(2L) = 2ψ(L) exactly and the decay report."""
        one = solve_corrector(classical_potential, small_layer, 1.0)
        two = solve_corrector(classical_potential, small_layer, 2.0)

        assert np.array_equal(two.field.values, 2.0 * one.field.values)
        assert two.sweeps == one.sweeps
        assert verify_corrector_tails(one).passed
        assert verify_corrector_tails(two).passed

    @pytest.mark.slow
    def test_orthogonal_to_layer_derivative(
        self, classical_potential: PotentialSpec, small_layer: LayerProfile
    ) -> None:
        """Test that ψ carries no component along φ'."""
        corrector = solve_corrector(classical_potential, small_layer, 1.0)
        direction = small_layer.derivative.values[8:-8]

        overlap = corrector.field.values[8:-8] @ direction / np.linalg.norm(direction)

        assert abs(overlap) < 1e-10

    def test_not_converged(self, classical_potential: PotentialSpec, small_layer: LayerProfile) -> None:
        """Test the sweep limit."""
        with pytest.raises(RuntimeError, match="did not converge"):
            solve_corrector(classical_potential, small_layer, 1.0, max_sweeps=1)
