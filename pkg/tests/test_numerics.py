"""Tests for orowan_lab.numerics module."""

import math

import numpy as np
import pytest

from orowan_lab.models import Grid1D, ScalarField
from orowan_lab.numerics import (
    central_derivative,
    cumulative_integral,
    grid_for_resolution,
    resample,
    sample_field,
    spectral_derivative,
    sup_distance,
    tail_masses,
    trapezoid_integral,
    wavenumbers,
)


def periodic_grid(n: int = 64) -> Grid1D:
    """Grid whose FFT period n·h equals 2π."""
    h = 2.0 * math.pi / n
    return Grid1D(0.0, 0.5 * h * (n - 1), n)


class TestSampleField:
    """Test sample_field."""

    def test_default_limits(self) -> None:
        """Test that the limits default to the edge samples."""
        field = sample_field(Grid1D(0.0, 1.0, 16), lambda x: x + 2.0)

        assert field.left_limit == pytest.approx(1.0)
        assert field.right_limit == pytest.approx(3.0)

    def test_explicit_metadata(self) -> None:
        """Test explicit limits and tail."""
        field = sample_field(Grid1D(0.0, 1.0, 16), np.zeros_like, left_limit=0.0, right_limit=0.0, tail_power=2.0)

        assert field.tail_power == 2.0


class TestGridForResolution:
    """Test grid_for_resolution."""

    def test_power_of_two(self) -> None:
        """Test the smallest power-of-two grid meeting the spacing."""
        grid = grid_for_resolution(0.0, 4.0, 0.01)

        assert grid.n == 1024
        assert grid.h <= 0.01

    def test_minimum_size(self) -> None:
        """Test that coarse requests still give a valid grid."""
        assert grid_for_resolution(0.0, 1.0, 10.0).n == 8

    def test_limit_exceeded(self) -> None:
        """Test that infeasible resolutions are rejected."""
        with pytest.raises(ValueError, match="above the limit"):
            grid_for_resolution(0.0, 4.0, 0.01, max_n=512)

    def test_non_positive_spacing(self) -> None:
        """Test that the spacing must be positive."""
        with pytest.raises(ValueError, match="positive"):
            grid_for_resolution(0.0, 4.0, 0.0)


class TestIntegrals:
    """Test trapezoid_integral, tail_masses and cumulative_integral."""

    def test_gaussian(self) -> None:
        """Test ∫ exp(-x²) = √π."""
        field = sample_field(Grid1D(0.0, 10.0, 2001), lambda x: np.exp(-(x**2)), left_limit=0.0, right_limit=0.0)

        assert trapezoid_integral(field) == pytest.approx(math.sqrt(math.pi), abs=1e-10)

    def test_lorentzian_tail_mass(self) -> None:
        """Test that the modelled tails recover the mass beyond the grid."""
        grid = Grid1D(0.0, 50.0, 10001)
        field = sample_field(grid, lambda x: 1.0 / (1.0 + x**2), left_limit=0.0, right_limit=0.0, tail_power=2.0)
        truncated = field.with_values(field.values, tail_power=None)

        left, right = tail_masses(field)

        assert left == pytest.approx(right)
        assert left == pytest.approx(math.atan(1.0 / 50.0), rel=1e-3)
        assert trapezoid_integral(field) == pytest.approx(math.pi, abs=1e-4)
        assert abs(trapezoid_integral(truncated) - math.pi) > 0.03

    def test_divergent_limits(self) -> None:
        """Test that non-decaying fields have no integral."""
        field = sample_field(Grid1D(0.0, 1.0, 16), np.ones_like)

        with pytest.raises(ValueError, match="Divergent"):
            trapezoid_integral(field)

    def test_divergent_tail(self) -> None:
        """Test that a 1/|x| tail with an amplitude has no integral."""
        field = sample_field(
            Grid1D(0.0, 5.0, 64),
            lambda x: 1.0 / (1.0 + np.abs(x)),
            left_limit=0.0,
            right_limit=0.0,
            tail_power=1.0,
        )

        with pytest.raises(ValueError, match="Divergent"):
            tail_masses(field)

    def test_cumulative_limits(self) -> None:
        """Test that the antiderivative of a Gaussian is monotone with limits 0 and √π."""
        field = sample_field(Grid1D(0.0, 10.0, 2001), lambda x: np.exp(-(x**2)), left_limit=0.0, right_limit=0.0)

        primitive = cumulative_integral(field)

        assert primitive.monotone
        assert primitive.left_limit == 0.0
        assert primitive.right_limit == pytest.approx(math.sqrt(math.pi), abs=1e-10)
        assert primitive.evaluate(0.0) == pytest.approx(0.5 * math.sqrt(math.pi), abs=1e-6)


class TestDerivatives:
    """Test central_derivative and spectral_derivative."""

    def test_central_logistic(self, logistic_field: ScalarField) -> None:
        """Test the derivative (1/2)sech²x of the logistic profile."""
        derivative = central_derivative(logistic_field)
        exact = 0.5 / np.cosh(logistic_field.nodes) ** 2

        assert np.max(np.abs(derivative.values - exact)) < 1e-4
        assert derivative.left_limit == 0.0
        assert derivative.tail_power is None

    def test_central_raises_tail_power(self) -> None:
        """Test that differentiation steepens the tail by one power."""
        field = sample_field(
            Grid1D(0.0, 5.0, 64), np.arctan, left_limit=-math.pi / 2, right_limit=math.pi / 2, tail_power=1.0
        )

        assert central_derivative(field).tail_power == 2.0

    def test_spectral_band_limited(self) -> None:
        """Test that the Fourier derivative of sin 3x is exact to round-off."""
        grid = periodic_grid()
        field = sample_field(grid, lambda x: np.sin(3.0 * x), left_limit=0.0, right_limit=0.0)

        derivative = spectral_derivative(field)

        assert np.allclose(derivative.values, 3.0 * np.cos(3.0 * grid.nodes), atol=1e-11)

    def test_spectral_unequal_limits(self, logistic_field: ScalarField) -> None:
        """Test that a jump between the limits is rejected."""
        with pytest.raises(ValueError, match="equal far-field limits"):
            spectral_derivative(logistic_field)

    def test_wavenumbers(self) -> None:
        """Test the length and spacing of the angular wavenumbers."""
        grid = periodic_grid()
        k = wavenumbers(grid)

        assert k.size == grid.n // 2 + 1
        assert k[1] == pytest.approx(1.0)


class TestDistances:
    """Test sup_distance and resample."""

    def test_window(self) -> None:
        """Test that the distance is taken on the window only."""
        grid = Grid1D(0.0, 4.0, 9)
        a = ScalarField(grid, np.zeros(9), 0.0, 0.0)
        b = a.with_values(np.array([5.0, 0, 0, 0, 1.0, 0, 0, 0, 5.0]))

        assert sup_distance(a, b) == 5.0
        assert sup_distance(a, b, (-1.0, 1.0)) == 1.0

    def test_grid_mismatch(self) -> None:
        """Test that fields on different grids are not compared."""
        a = ScalarField(Grid1D(0.0, 4.0, 9), np.zeros(9), 0.0, 0.0)
        b = ScalarField(Grid1D(0.0, 4.0, 17), np.zeros(17), 0.0, 0.0)

        with pytest.raises(ValueError, match="Grid mismatch"):
            sup_distance(a, b)

    def test_empty_window(self) -> None:
        """Test a window between the nodes."""
        a = ScalarField(Grid1D(0.0, 4.0, 9), np.zeros(9), 0.0, 0.0)

        with pytest.raises(ValueError, match="contains no grid node"):
            sup_distance(a, a, (0.1, 0.2))

    def test_resample_logistic(self, logistic_field: ScalarField) -> None:
        """Test interpolation onto another grid."""
        target = Grid1D(0.0, 30.0, 3001)

        moved = resample(logistic_field, target)
        exact = 0.5 * (1.0 + np.tanh(target.nodes))

        assert np.max(np.abs(moved.values - exact)) < 1e-5
        assert moved.monotone
        assert moved.right_limit == 1.0
