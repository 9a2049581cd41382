"""Tests for orowan_lab.particles module."""

import math

import numpy as np
import pytest

from orowan_lab.models import Grid1D, LayerProfile, ParticleSystem, ScalarField, is_nondecreasing
from orowan_lab.particles import (
    ddd_integrate,
    ddd_max_stable_dt,
    ddd_rhs,
    layer_centres,
    level_points,
    reconstruct,
    spacing_bounds_check,
    two_body_separation,
)


class TestLevelPoints:
    """Test level_points."""

    def test_logistic_quarter_levels(self, logistic_field: ScalarField) -> None:
        """Test the three level points of (1 + tanh x)/2 at ε = 1/4."""
        ps = level_points(logistic_field, 0.25, 0.25)

        assert ps.m_index == 1
        assert ps.count == 3
        assert np.allclose(ps.positions, [math.atanh(-0.5), 0.0, math.atanh(0.5)], atol=1e-4)

    def test_index_range(self, logistic_field: ScalarField) -> None:
        """Test M_ε and N_ε when 1/ε is an integer."""
        ps = level_points(logistic_field, 0.1, 0.1)

        assert ps.m_index == 1
        assert ps.n_index == 9
        assert ps.base_level == pytest.approx(0.1)

    def test_offset_profile(self) -> None:
        """Test a profile that does not start at a multiple of ε."""
        grid = Grid1D(0.0, 20.0, 4001)
        values = 0.33 + 0.5 * (1.0 + np.tanh(grid.nodes))
        field = ScalarField(grid, values, 0.33, 1.33, monotone=True)

        ps = level_points(field, 0.25, 0.25)

        assert ps.m_index == 3
        assert ps.n_index == 4
        assert np.all(np.diff(ps.positions) > 0)

    def test_leftmost_crossing_on_plateau(self) -> None:
        """Test that a level attained on a plateau is placed at its left end."""
        grid = Grid1D(0.0, 4.0, 9)
        values = np.array([0.0, 0.1, 0.5, 0.5, 0.5, 0.6, 0.8, 0.9, 1.0])
        field = ScalarField(grid, values, 0.0, 1.0)

        ps = level_points(field, 0.5, 0.1)

        assert ps.count == 1
        assert ps.positions[0] == pytest.approx(-2.0)

    def test_non_monotone(self) -> None:
        """Test that decreasing profiles are rejected."""
        grid = Grid1D(0.0, 1.0, 16)
        field = ScalarField(grid, np.sin(4.0 * grid.nodes), 0.0, 0.0)

        with pytest.raises(ValueError, match="non-decreasing"):
            level_points(field, 0.1, 0.1)

    def test_non_positive_scales(self, logistic_field: ScalarField) -> None:
        """Test that ε and δ must be positive."""
        with pytest.raises(ValueError, match="must be positive"):
            level_points(logistic_field, 0.0, 0.1)

    def test_empty_system(self, logistic_field: ScalarField) -> None:
        """Test that a range shorter than 2ε has no level points."""
        with pytest.raises(ValueError, match="Empty particle system"):
            level_points(logistic_field, 0.6, 0.1)

    def test_level_not_on_grid(self) -> None:
        """Test a declared range wider than the sampled one."""
        grid = Grid1D(0.0, 1.0, 64)
        field = ScalarField(grid, 0.5 * (1.0 + np.tanh(grid.nodes)), 0.0, 1.0)

        with pytest.raises(ValueError, match="not attained"):
            level_points(field, 0.1, 0.1)


class TestSpacing:
    """Test spacing_bounds_check."""

    def test_logistic_bounds(self, logistic_field: ScalarField) -> None:
        """Test ε/L ≤ gaps ≤ ε/a and the inverse-square bound."""
        ps = level_points(logistic_field, 0.05, 0.05)
        slope_floor = 0.5 / math.cosh(1.5) ** 2

        report = spacing_bounds_check(ps, 0.5, slope_floor, (-1.5, 1.5), n_probes=50)

        assert report.passed
        assert [row.label for row in report.rows] == ["min-gap", "max-gap", "inverse-square"]
        assert report.row("min-gap").value >= 0.1

    def test_empty_window(self, logistic_field: ScalarField) -> None:
        """Test that a window with fewer than two particles passes with NaN gaps."""
        ps = level_points(logistic_field, 0.25, 0.25)

        report = spacing_bounds_check(ps, 0.5, 0.1, (5.0, 6.0), n_probes=10)

        assert math.isnan(report.row("min-gap").value)
        assert report.row("max-gap").passed

    def test_seeded_probes(self, logistic_field: ScalarField) -> None:
        """Test that equal seeds give equal reports."""
        ps = level_points(logistic_field, 0.05, 0.05)

        first = spacing_bounds_check(ps, 0.5, 0.05, (-1.0, 1.0), seed=3)
        second = spacing_bounds_check(ps, 0.5, 0.05, (-1.0, 1.0), seed=3)

        assert first.row("inverse-square").value == second.row("inverse-square").value


class TestReconstruct:
    """Test reconstruct and layer_centres."""

    def test_limits_and_monotonicity(self, logistic_field: ScalarField, closed_form_layer: LayerProfile) -> None:
        """Test the far-field limits and monotonicity of the layered profile."""
        ps = level_points(logistic_field, 0.1, 0.1)
        grid = Grid1D(0.0, 4.0, 2048)

        rebuilt = reconstruct(ps, closed_form_layer, grid)

        assert rebuilt.left_limit == pytest.approx(0.1)
        assert rebuilt.right_limit == pytest.approx(1.0)
        assert rebuilt.monotone
        assert is_nondecreasing(rebuilt.values)

    def test_error_of_order_epsilon(self, logistic_field: ScalarField, closed_form_layer: LayerProfile) -> None:
        """Test that the layered profile stays within O(ε) of the smooth one."""
        ps = level_points(logistic_field, 0.1, 0.1)
        grid = Grid1D(0.0, 4.0, 2048)

        rebuilt = reconstruct(ps, closed_form_layer, grid)
        exact = 0.5 * (1.0 + np.tanh(grid.nodes))
        window = grid.window_mask((-3.0, 3.0))

        assert np.max(np.abs(rebuilt.values[window] - exact[window])) <= 0.15

    def test_centres_near_level_points(self, logistic_field: ScalarField, closed_form_layer: LayerProfile) -> None:
        """Test that the half-level crossings sit within εδ of the level points."""
        ps = level_points(logistic_field, 0.1, 0.1)
        grid = Grid1D(0.0, 4.0, 4096)
        rebuilt = reconstruct(ps, closed_form_layer, grid)

        centres = layer_centres(rebuilt, ps.epsilon, ps.base_level, count=ps.count)

        assert centres.size == ps.count
        assert np.max(np.abs(centres - ps.positions)) <= ps.epsilon * ps.delta

    def test_centres_without_count(self, logistic_field: ScalarField) -> None:
        """Test that every half level in range is located."""
        centres = layer_centres(logistic_field, 0.25, 0.0)

        assert centres.size == 4
        assert np.all(np.diff(centres) > 0)


class TestDdd:
    """Test the discrete dislocation dynamics."""

    def test_rhs_three_particles(self) -> None:
        """Test the velocities ∓3c₀/(2πa) of the outer and 0 of the middle dislocation."""
        a, c0 = 0.7, math.pi

        velocity = ddd_rhs([-a, 0.0, a], c0)

        assert velocity[0] == pytest.approx(-3.0 * c0 / (2.0 * math.pi * a))
        assert velocity[2] == pytest.approx(3.0 * c0 / (2.0 * math.pi * a))
        assert velocity[1] == 0.0

    @pytest.mark.parametrize("positions", [[0.0, 0.0], [1.0, 0.0]])
    def test_rhs_unordered(self, positions: list[float]) -> None:
        """Test that coincident or crossed positions are rejected."""
        with pytest.raises(ValueError, match="strictly increasing"):
            ddd_rhs(positions, 1.0)

    def test_stable_dt(self) -> None:
        """Test the repulsion CFL budget."""
        assert ddd_max_stable_dt([0.0], 1.0) == math.inf
        assert ddd_max_stable_dt([0.0, 1.0], math.pi) == pytest.approx(0.1)

    def test_two_body_closed_form(self) -> None:
        """Test s(1) = √5 for s₀ = 1 and c₀ = π."""
        trajectory = ddd_integrate([-0.5, 0.5], math.pi, 1e-3, 1.0)
        separation = trajectory.positions[:, 1] - trajectory.positions[:, 0]

        assert trajectory.times.size == 21
        assert separation[-1] == pytest.approx(math.sqrt(5.0), rel=1e-8)
        assert np.allclose(separation, two_body_separation(1.0, math.pi, trajectory.times), rtol=1e-8)

    def test_centre_of_mass(self) -> None:
        """Test that the mean position is conserved."""
        trajectory = ddd_integrate([-1.3, -0.2, 0.4, 2.0], 1.0, 1e-3, 0.5)
        centre = trajectory.positions.mean(axis=1)

        assert np.max(np.abs(centre - centre[0])) < 1e-12
        assert np.all(np.diff(trajectory.positions, axis=1) > 0)

    def test_symmetric_middle_stays(self) -> None:
        """Test that the middle of a symmetric triple does not move."""
        trajectory = ddd_integrate([-1.0, 0.0, 1.0], 1.0, 1e-2, 1.0)

        assert np.max(np.abs(trajectory.positions[:, 1])) <= 1e-14
        assert np.allclose(trajectory.positions[:, 0], -trajectory.positions[:, 2])

    def test_sample_times(self) -> None:
        """Test that samples land exactly on the requested times."""
        trajectory = ddd_integrate([-0.5, 0.5], 1.0, 0.03, 0.5, sample_times=[0.5, 0.1, 0.25])

        assert trajectory.times.tolist() == [0.1, 0.25, 0.5]
        assert trajectory.positions.shape == (3, 2)

    def test_zero_time(self) -> None:
        """Test that T = 0 returns the initial positions."""
        trajectory = ddd_integrate([-0.5, 0.5], 1.0, 1e-3, 0.0)

        assert trajectory.times.tolist() == [0.0]
        assert trajectory.positions[0].tolist() == [-0.5, 0.5]

    def test_dt_above_budget(self) -> None:
        """Test that an unstable step is refused."""
        with pytest.raises(ValueError, match="CFL budget"):
            ddd_integrate([-0.05, 0.05], 1.0, 0.1, 1.0)

    def test_sample_time_outside_run(self) -> None:
        """Test that sample times must lie in [0, T]."""
        with pytest.raises(ValueError, match="Sample times"):
            ddd_integrate([-0.5, 0.5], 1.0, 1e-3, 1.0, sample_times=[2.0])

    def test_separation_array(self) -> None:
        """Test the closed form on an array of times."""
        values = two_body_separation(2.0, math.pi, np.array([0.0, 3.0]))

        assert np.allclose(values, [2.0, 4.0])
        assert two_body_separation(1.0, math.pi, 1.0) == pytest.approx(math.sqrt(5.0))


def test_particle_system_from_level_points_is_frozen(logistic_field: ScalarField) -> None:
    """Test that level points cannot be modified in place."""
    ps: ParticleSystem = level_points(logistic_field, 0.25, 0.25)

    with pytest.raises(ValueError, match="read-only"):
        ps.positions[0] = 0.0
