#!/usr/bin/env python3
# this_file: src/orowan_lab/nonlocal_ops.py

"""Half-Laplacian I₁ = -(-Δ)^{1/2}, Hilbert transform and particle-sum estimators.

Sign conventions: I₁ has Fourier symbol -|ξ| and kernel (1/π)/(y - x)²;
H[v](x) = (1/π) PV∫ v(y)/(y - x) dy has symbol i·sgn(ξ). With this pairing
I₁[u] = H[u_x].

The pv-quadrature path integrates the piecewise-linear interpolant of the
samples against the kernel on a lattice that continues past the grid edges
with the field's tail model. Offsets m ≥ 2 carry the exact hat moments
ln(m²/(m²-1)) of the kernel (in units of 1/h). The nearest-neighbour moment
diverges, and its weight is ln π: the value that removes the θ² term of the
discrete symbol. The weights then sum to ln 2π.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from functools import lru_cache

import numpy as np
from loguru import logger
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad
from scipy.signal import fftconvolve

from .models import Grid1D, OperatorBackend, ParticleSystem, ScalarField
from .numerics import LIMIT_TOLERANCE, wavenumbers

# Nearest-neighbour weight of the I₁ lattice kernel (in units of 1/h)
FIRST_WEIGHT = math.log(math.pi)
# Virtual nodes per side sampled from the tail model before switching to quadrature
VIRTUAL_NODES = 32
# Gauss-Legendre nodes for the far tail integrals
TAIL_QUADRATURE_NODES = 64
# Width of the reference ramp, as a fraction of the grid half width
RAMP_WIDTH_FRACTION = 0.125
# Admissible window radii are [ε^(5/8), WINDOW_BAND_CONSTANT·ε^(1/2)]
WINDOW_BAND_CONSTANT = 1.0
QUAD_LIMIT = 200


@lru_cache(maxsize=32)
def _i1_weights(size: int) -> np.ndarray:
    """ω_m·h for m = 0..size-1 (ω_0 = 0)."""
    w = np.zeros(size)
    if size > 1:
        w[1] = FIRST_WEIGHT
    m = np.arange(2, size, dtype=float)
    w[2:] = np.log1p(1.0 / (m * m - 1.0))
    w.flags.writeable = False
    return w


def _i1_tail_sum(start: np.ndarray) -> np.ndarray:
    """Σ_{m ≥ M} ω_m·h in closed form, for integer M ≥ 1."""
    start = np.asarray(start, dtype=float)
    out = np.empty_like(start)
    first = start <= 1
    out[first] = FIRST_WEIGHT + math.log(2.0)
    rest = start[~first]
    out[~first] = -np.log1p(-1.0 / rest)
    return out


@lru_cache(maxsize=32)
def _hilbert_weights(size: int) -> np.ndarray:
    """β_m for m = 0..size-1: exact moments of the hat functions against 1/s."""
    b = np.zeros(size)
    if size > 1:
        b[1] = 2.0 * math.log(2.0)
    m = np.arange(2, size, dtype=float)
    b[2:] = (m + 1.0) * np.log1p(1.0 / m) - (m - 1.0) * np.log1p(1.0 / (m - 1.0))
    b.flags.writeable = False
    return b


@lru_cache(maxsize=1)
def _unit_gauss_legendre() -> tuple[np.ndarray, np.ndarray]:
    nodes, weights = leggauss(TAIL_QUADRATURE_NODES)
    return 0.5 * (nodes + 1.0), 0.5 * weights


def _virtual_extension(f: ScalarField, count: int) -> np.ndarray:
    """Samples continued ``count`` nodes past each edge with the tail model."""
    grid = f.grid
    offsets = grid.h * np.arange(1, count + 1)
    left_x = grid.left - offsets[::-1]
    right_x = grid.right + offsets
    return np.concatenate([np.asarray(f.evaluate(left_x)), f.values, np.asarray(f.evaluate(right_x))])


@lru_cache(maxsize=32)
def _far_tail_profiles(grid: Grid1D, power: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distances to the far tails and ((edge - c)/(y - c))**power at their quadrature points.

    The far tail starts half a cell past the last virtual node; y = start ± d_k·t/(1 - t).
    """
    t, _ = _unit_gauss_legendre()
    x = grid.nodes
    c = grid.center
    reach = (VIRTUAL_NODES + 0.5) * grid.h
    d_right = (grid.right + reach) - x
    d_left = x - (grid.left - reach)
    stretch = t / (1.0 - t)
    y_right = grid.right + reach + np.multiply.outer(d_right, stretch)
    y_left = grid.left - reach - np.multiply.outer(d_left, stretch)
    ratio_right = ((grid.right - c) / (y_right - c)) ** power
    ratio_left = ((c - grid.left) / (c - y_left)) ** power
    return np.stack([d_left, d_right]), ratio_left, ratio_right


def _i1_far_tails(f: ScalarField) -> np.ndarray:
    """(1/π)-less contribution ∫ (tail - limit)/(y - x)² dy beyond the virtual nodes."""
    if f.tail_power is None:
        return np.zeros(f.grid.n)
    left_amp, right_amp = f.edge_amplitudes
    _, w = _unit_gauss_legendre()
    distances, ratio_left, ratio_right = _far_tail_profiles(f.grid, float(f.tail_power))
    return left_amp * (ratio_left @ w) / distances[0] + right_amp * (ratio_right @ w) / distances[1]


def _hilbert_far_tails(f: ScalarField) -> np.ndarray:
    if f.tail_power is None:
        return np.zeros(f.grid.n)
    left_amp, right_amp = f.edge_amplitudes
    t, w = _unit_gauss_legendre()
    _, ratio_left, ratio_right = _far_tail_profiles(f.grid, float(f.tail_power))
    jacobian = w / (1.0 - t)
    return right_amp * (ratio_right @ jacobian) - left_amp * (ratio_left @ jacobian)


def _i1_pv(f: ScalarField) -> np.ndarray:
    n, h, j = f.grid.n, f.grid.h, VIRTUAL_NODES
    ext = _virtual_extension(f, j)
    size = ext.size
    w = _i1_weights(size)
    kernel = np.concatenate([w[:0:-1], w])
    ref = ext[0]
    g = ext - ref
    conv = fftconvolve(g, kernel, mode="same")[j : j + n]
    cumulative = np.cumsum(w)
    k = np.arange(n)
    total = cumulative[k + j] + cumulative[n + j - 1 - k]
    gk = f.values - ref
    lattice = conv - gk * total
    lattice += (f.left_limit - f.values) * _i1_tail_sum(k + j + 1)
    lattice += (f.right_limit - f.values) * _i1_tail_sum(n + j - k)
    return (lattice / h + _i1_far_tails(f)) / math.pi


def _ramp_parameters(f: ScalarField) -> tuple[float, float]:
    return f.grid.center, RAMP_WIDTH_FRACTION * f.grid.half_width


def _i1_spectral(f: ScalarField) -> np.ndarray:
    x = f.nodes
    jump = f.right_limit - f.left_limit
    ramp_i1 = np.zeros(f.grid.n)
    values = f.values
    if abs(jump) > LIMIT_TOLERANCE:
        c, a = _ramp_parameters(f)
        z = x - c
        values = values - (f.left_limit + jump * (0.5 + np.arctan(z / a) / math.pi))
        ramp_i1 = -jump * z / (math.pi * (z * z + a * a))
    k = wavenumbers(f.grid)
    spectrum = np.fft.rfft(values) * (-np.abs(k))
    return np.fft.irfft(spectrum, n=f.grid.n) + ramp_i1


def i1_apply(f: ScalarField, backend: OperatorBackend = OperatorBackend.PV) -> ScalarField:
    """I₁[f] at every grid node.

    Used in:
    - layer.py
    - solvers.py
    - studies.py
    """
    backend = OperatorBackend.parse(backend)
    values = _i1_pv(f) if backend is OperatorBackend.PV else _i1_spectral(f)
    decay = 1.0 if abs(f.right_limit - f.left_limit) > LIMIT_TOLERANCE else 2.0
    return ScalarField(grid=f.grid, values=values, left_limit=0.0, right_limit=0.0, tail_power=decay)


def _hilbert_pv(f: ScalarField) -> np.ndarray:
    n, j = f.grid.n, VIRTUAL_NODES
    ext = _virtual_extension(f, j)
    b = _hilbert_weights(ext.size)
    # conv_k = Σ_j v_j K[k - j] with K[m] = -sgn(m)·β_|m|
    kernel = np.concatenate([b[:0:-1], -b])
    conv = fftconvolve(ext, kernel, mode="same")[j : j + n]
    return (conv + _hilbert_far_tails(f)) / math.pi


def _hilbert_spectral(f: ScalarField) -> np.ndarray:
    k = wavenumbers(f.grid)
    spectrum = np.fft.rfft(f.values - f.left_limit) * (1j * np.sign(k))
    if f.grid.n % 2 == 0:
        spectrum[-1] = 0.0
    return np.fft.irfft(spectrum, n=f.grid.n)


def hilbert_apply(f: ScalarField, backend: OperatorBackend = OperatorBackend.SPECTRAL) -> ScalarField:
    """H[f] at every grid node.

    The spectral path treats the samples as one period. The pv path is the
    decaying-density path and needs zero far-field limits.

    Used in:
    - solvers.py
    """
    backend = OperatorBackend.parse(backend)
    if backend is OperatorBackend.PV:
        if abs(f.left_limit) > LIMIT_TOLERANCE or abs(f.right_limit) > LIMIT_TOLERANCE:
            msg = f"Hilbert transform needs a decaying field, limits are ({f.left_limit}, {f.right_limit})"
            raise ValueError(msg)
        values = _hilbert_pv(f)
    else:
        if abs(f.left_limit - f.right_limit) > LIMIT_TOLERANCE:
            msg = "Spectral Hilbert transform needs equal far-field limits"
            raise ValueError(msg)
        values = _hilbert_spectral(f)
    return ScalarField(grid=f.grid, values=values, left_limit=0.0, right_limit=0.0, tail_power=1.0)


# Pointwise quadrature


def _pointwise_parts(func: Callable[[float], float], x: float, r: float) -> tuple[float, float]:
    fx = float(func(x))

    def second_difference(y: float) -> float:
        return (float(func(x + y)) + float(func(x - y)) - 2.0 * fx) / (y * y)

    short, _ = quad(second_difference, 0.0, r, limit=QUAD_LIMIT)
    long, _ = quad(second_difference, r, np.inf, limit=QUAD_LIMIT)
    return short / math.pi, long / math.pi


def i1_pointwise(func: Callable[[float], float], x: float, *, split: float = 1.0) -> float:
    """I₁[func](x) by adaptive quadrature of the symmetric second difference.

    Independent of any grid; used as the reference for the discrete operators.

    Used in:
    - studies.py
    """
    short, long = _pointwise_parts(func, x, split)
    return short + long


def i1_split(f: ScalarField, x: float, r: float) -> tuple[float, float]:
    """Short-range (|y| < r) and long-range parts of I₁[f](x)."""
    if r < 2.0 * f.grid.h:
        msg = f"Split radius r={r} is below the grid resolution 2h={2.0 * f.grid.h:.3g}"
        raise ValueError(msg)
    return _pointwise_parts(f.evaluate, x, r)


# Particle sums


def nearest_particle(ps: ParticleSystem, x: float) -> int:
    """Index of the particle closest to ``x``; ties go to the left one."""
    positions = ps.positions
    right = int(np.searchsorted(positions, x))
    if right == 0:
        return 0
    if right == ps.count:
        return ps.count - 1
    left = right - 1
    return left if x - positions[left] <= positions[right] - x else right


def _offsets_without_nearest(ps: ParticleSystem, x: float) -> np.ndarray:
    nearest = nearest_particle(ps, x)
    return np.delete(ps.positions - x, nearest)


def particle_sum_full(ps: ParticleSystem, x: float) -> float:
    """(1/π) Σ_{i ≠ i₀} ε/(x_i - x), the nearest particle i₀ excluded.

    Used in:
    - studies.py
    """
    offsets = _offsets_without_nearest(ps, x)
    return float(np.sum(ps.epsilon / offsets) / math.pi)


def particle_sum_truncated(ps: ParticleSystem, x: float, r: float) -> float:
    """(1/π) Σ_{|x_i - x| ≥ r} ε/(x_i - x)."""
    if not r > 0:
        msg = f"Truncation radius must be positive, got {r}"
        raise ValueError(msg)
    offsets = ps.positions - x
    far = offsets[np.abs(offsets) >= r]
    return float(np.sum(ps.epsilon / far) / math.pi)


def window_in_band(epsilon: float, r: float) -> bool:
    """Whether r lies in [ε^(5/8), c·ε^(1/2)]."""
    return epsilon**0.625 <= r <= WINDOW_BAND_CONSTANT * math.sqrt(epsilon)


def short_window_sum(ps: ParticleSystem, x: float, r: float) -> float:
    """(1/π) Σ_{i ≠ i₀, |x_i - x| < r} ε/(x_i - x)."""
    if not window_in_band(ps.epsilon, r):
        logger.warning(f"Window radius r={r:.3g} outside the admissible band for ε={ps.epsilon:.3g}")
    offsets = _offsets_without_nearest(ps, x)
    near = offsets[np.abs(offsets) < r]
    return float(np.sum(ps.epsilon / near) / math.pi)


def inverse_square_sum(ps: ParticleSystem, x: float) -> float:
    """Σ_{i ≠ i₀} ε²/(x_i - x)²."""
    offsets = _offsets_without_nearest(ps, x)
    return float(np.sum((ps.epsilon / offsets) ** 2))
