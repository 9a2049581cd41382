#!/usr/bin/env python3
# this_file: src/orowan_lab/numerics.py

"""Grids, sampled fields, quadrature, differentiation and norms."""

from __future__ import annotations

import math
from collections.abc import Callable

import numpy as np
from loguru import logger
from scipy.integrate import cumulative_trapezoid, trapezoid

from .models import Grid1D, ScalarField, is_nondecreasing

# Edge offsets below this are treated as an absent tail
TAIL_AMPLITUDE_TOLERANCE = 1e-14
LIMIT_TOLERANCE = 1e-12


def sample_field(
    grid: Grid1D,
    func: Callable[[np.ndarray], np.ndarray],
    *,
    left_limit: float | None = None,
    right_limit: float | None = None,
    tail_power: float | None = None,
    monotone: bool = False,
) -> ScalarField:
    """Sample ``func`` on the grid; limits default to the edge samples.

    Used in:
    - layer.py
    - studies.py
    """
    values = np.asarray(func(grid.nodes), dtype=float)
    return ScalarField(
        grid=grid,
        values=values,
        left_limit=float(values[0]) if left_limit is None else float(left_limit),
        right_limit=float(values[-1]) if right_limit is None else float(right_limit),
        tail_power=tail_power,
        monotone=monotone,
    )


def grid_for_resolution(center: float, half_width: float, h_max: float, *, max_n: int | None = None) -> Grid1D:
    """Smallest power-of-two grid on the interval whose spacing is at most ``h_max``."""
    if not h_max > 0:
        msg = f"Grid spacing must be positive, got {h_max}"
        raise ValueError(msg)
    needed = 2.0 * half_width / h_max + 1.0
    n = max(8, 1 << math.ceil(math.log2(needed)))
    if max_n is not None and n > max_n:
        msg = f"Resolution h <= {h_max:.3g} on half width {half_width} needs n = {n} nodes, above the limit {max_n}"
        raise ValueError(msg)
    return Grid1D(center, half_width, n)


def tail_masses(f: ScalarField) -> tuple[float, float]:
    """Integrals of ``f - limit`` over the modelled tails beyond the left and right edges.

    Used in:
    - trapezoid_integral
    - cumulative_integral
    - solvers.py
    """
    left_amp, right_amp = f.edge_amplitudes
    if f.tail_power is None:
        return 0.0, 0.0
    has_tail = abs(left_amp) > TAIL_AMPLITUDE_TOLERANCE or abs(right_amp) > TAIL_AMPLITUDE_TOLERANCE
    if f.tail_power <= 1.0:
        if has_tail:
            msg = f"Divergent integral: tail decays like |x|^-{f.tail_power} with a nonzero amplitude"
            raise ValueError(msg)
        return 0.0, 0.0
    grid = f.grid
    scale = 1.0 / (f.tail_power - 1.0)
    left = left_amp * (grid.center - grid.left) * scale
    right = right_amp * (grid.right - grid.center) * scale
    return float(left), float(right)


def trapezoid_integral(f: ScalarField) -> float:
    """Integral over the real line: trapezoid sum on the grid plus the analytic tail masses.

    Used in:
    - layer.py
    - solvers.py
    """
    if abs(f.left_limit) > LIMIT_TOLERANCE or abs(f.right_limit) > LIMIT_TOLERANCE:
        msg = f"Divergent integral: far-field limits ({f.left_limit}, {f.right_limit}) are not zero"
        raise ValueError(msg)
    left, right = tail_masses(f)
    return float(trapezoid(f.values, dx=f.grid.h)) + left + right


def cumulative_integral(f: ScalarField, base: float = 0.0) -> ScalarField:
    """G(x) = base + ∫_{x0}^{x} f, carrying the tail masses into the far-field limits of G."""
    values = base + cumulative_trapezoid(f.values, dx=f.grid.h, initial=0.0)
    tail_power: float | None = None
    if abs(f.left_limit) > LIMIT_TOLERANCE or abs(f.right_limit) > LIMIT_TOLERANCE:
        logger.warning("Cumulative integral of a non-decaying field; limits taken at the grid edges")
        left_limit, right_limit = float(values[0]), float(values[-1])
    else:
        left_mass, right_mass = tail_masses(f)
        left_limit = base - left_mass
        right_limit = float(values[-1]) + right_mass
        if f.tail_power is not None and f.tail_power > 1.0:
            tail_power = f.tail_power - 1.0
    return ScalarField(
        grid=f.grid,
        values=values,
        left_limit=left_limit,
        right_limit=right_limit,
        tail_power=tail_power,
        monotone=bool(np.all(f.values >= 0)),
    )


def central_derivative(f: ScalarField) -> ScalarField:
    """Second-order central differences inside, second-order one-sided at the edges."""
    values = np.gradient(f.values, f.grid.h, edge_order=2)
    tail_power = None if f.tail_power is None else f.tail_power + 1.0
    return ScalarField(grid=f.grid, values=values, left_limit=0.0, right_limit=0.0, tail_power=tail_power)


def wavenumbers(grid: Grid1D) -> np.ndarray:
    """Angular wavenumbers of the real FFT of the grid samples."""
    return 2.0 * math.pi * np.fft.rfftfreq(grid.n, d=grid.h)


def spectral_derivative(f: ScalarField) -> ScalarField:
    """Fourier derivative of the periodic extension of the samples."""
    if abs(f.left_limit - f.right_limit) > LIMIT_TOLERANCE:
        msg = "Spectral derivative needs equal far-field limits"
        raise ValueError(msg)
    k = wavenumbers(f.grid)
    spectrum = np.fft.rfft(f.values) * (1j * k)
    if f.grid.n % 2 == 0:
        spectrum[-1] = 0.0
    values = np.fft.irfft(spectrum, n=f.grid.n)
    return ScalarField(grid=f.grid, values=values, left_limit=0.0, right_limit=0.0)


def _check_same_grid(a: ScalarField, b: ScalarField) -> None:
    if a.grid != b.grid:
        msg = f"Grid mismatch: {a.grid} vs {b.grid}"
        raise ValueError(msg)


def sup_distance(a: ScalarField, b: ScalarField, window: tuple[float, float] | None = None) -> float:
    """max |a - b| over the nodes inside ``window``."""
    _check_same_grid(a, b)
    mask = a.grid.window_mask(window)
    if not np.any(mask):
        msg = f"Window {window} contains no grid node"
        raise ValueError(msg)
    return float(np.max(np.abs(a.values[mask] - b.values[mask])))


def resample(f: ScalarField, grid: Grid1D) -> ScalarField:
    """Interpolate ``f`` onto another grid, keeping its far-field metadata."""
    values = np.asarray(f.evaluate(grid.nodes))
    return ScalarField(
        grid=grid,
        values=values,
        left_limit=f.left_limit,
        right_limit=f.right_limit,
        tail_power=f.tail_power,
        monotone=f.monotone and is_nondecreasing(values),
    )
