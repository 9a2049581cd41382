#!/usr/bin/env python3
# this_file: src/orowan_lab/particles.py

"""Level points, layered reconstruction and discrete dislocation dynamics."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from loguru import logger

from .models import Grid1D, LayerProfile, ParticleSystem, ScalarField, Trajectory, ValidationReport, is_nondecreasing
from .nonlocal_ops import inverse_square_sum

# Slack on the ceil/floor of the level indices
INDEX_SLACK = 1e-9
# Relative slack on the gap bounds
GAP_SLACK = 1e-9
DEFAULT_SPOT_PROBES = 100
# Constant of the inverse-square spot check Σ ε²/(x_i - x)² ≤ c L²
INVERSE_SQUARE_CONSTANT = math.pi**2
# Fraction of the repulsion time scale gap² π / c₀ allowed per Runge-Kutta step
DDD_CFL_FACTOR = 0.1
DEFAULT_SAMPLE_COUNT = 20
PROGRESS_EVERY = 5000


def _level_range(v: ScalarField) -> tuple[float, float]:
    low = min(v.left_limit, float(np.min(v.values)))
    high = max(v.right_limit, float(np.max(v.values)))
    return low, high


def _leftmost_crossings(v: ScalarField, levels: np.ndarray) -> np.ndarray:
    """x = inf{x : v(x) = level} for each level, by bracketing and linear interpolation."""
    values = v.values
    nodes = v.nodes
    above = np.searchsorted(values, levels, side="left")
    crossings = np.empty(levels.shape)
    for k, (level, j) in enumerate(zip(levels, above, strict=True)):
        if j >= values.size:
            msg = f"Level {level:.6g} is not attained on the grid (max value {values[-1]:.6g})"
            raise ValueError(msg)
        if j == 0:
            if values[0] != level:
                msg = f"Level {level:.6g} is not attained on the grid (min value {values[0]:.6g})"
                raise ValueError(msg)
            crossings[k] = nodes[0]
            continue
        lo, hi = values[j - 1], values[j]
        weight = (level - lo) / (hi - lo)
        crossings[k] = nodes[j - 1] + weight * (nodes[j] - nodes[j - 1])
    return crossings


def level_points(v: ScalarField, epsilon: float, delta: float) -> ParticleSystem:
    """Points x_i = inf{x : v(x) = εi} for M_ε ≤ i ≤ N_ε.

    M_ε = ⌈(inf v + ε)/ε⌉ and N_ε = ⌊(sup v - ε)/ε⌋, where inf and sup include the far-field limits.

    Used in:
    - solvers.py
    - studies.py
    """
    if not epsilon > 0 or not delta > 0:
        msg = f"epsilon and delta must be positive, got ({epsilon}, {delta})"
        raise ValueError(msg)
    if not is_nondecreasing(v.values):
        msg = "Level points need a non-decreasing profile"
        raise ValueError(msg)
    low, high = _level_range(v)
    m_index = math.ceil((low + epsilon) / epsilon - INDEX_SLACK)
    n_index = math.floor((high - epsilon) / epsilon + INDEX_SLACK)
    if m_index > n_index:
        msg = f"Empty particle system: M={m_index} > N={n_index} for ε={epsilon} on range [{low:.6g}, {high:.6g}]"
        raise ValueError(msg)
    levels = epsilon * np.arange(m_index, n_index + 1)
    positions = _leftmost_crossings(v, levels)
    logger.debug(f"Level points: {positions.size} particles, M={m_index}, N={n_index}, ε={epsilon}")
    return ParticleSystem(epsilon=epsilon, delta=delta, positions=positions, m_index=m_index)


def layer_centres(u: ScalarField, epsilon: float, base: float, count: int | None = None) -> np.ndarray:
    """Crossings of the half levels base + ε(k + 1/2), k = 0, 1, ...

    With ``count`` the first ``count`` half levels are located and each must be attained;
    otherwise every half level inside the range of the samples is returned.
    """
    if count is None:
        top = float(np.max(u.values))
        count = max(0, math.ceil((top - base) / epsilon - 0.5 - INDEX_SLACK))
    levels = base + epsilon * (np.arange(count) + 0.5)
    return _leftmost_crossings(u, levels)


def spacing_bounds_check(
    ps: ParticleSystem,
    lipschitz: float,
    slope_floor: float,
    window: tuple[float, float],
    *,
    n_probes: int = DEFAULT_SPOT_PROBES,
    seed: int = 0,
) -> ValidationReport:
    """Check ε/L ≤ x_{i+1} - x_i ≤ ε/a inside ``window`` and the inverse-square spot bound.

    Args:
        ps: Level points of the profile.
        lipschitz: Upper bound L of v_x.
        slope_floor: Lower bound a of v_x on the window.
        window: Interval on which a ≤ v_x holds.
        n_probes: Random probe points of the inverse-square check.
        seed: Seed of the probe generator.

    Returns:
        Report with rows min-gap, max-gap and inverse-square.
    """
    report = ValidationReport("spacing")
    eps = ps.epsilon
    lo, hi = window
    inside = (ps.positions >= lo) & (ps.positions <= hi)
    pairs = inside[:-1] & inside[1:]
    gaps = ps.gaps[pairs]
    lower = eps / lipschitz
    upper = eps / slope_floor
    if gaps.size == 0:
        note = "fewer than two particles in the window"
        report.add("min-gap", math.nan, lower, passed=True, note=note)
        report.add("max-gap", math.nan, upper, passed=True, note=note)
    else:
        smallest, largest = float(np.min(gaps)), float(np.max(gaps))
        report.add("min-gap", smallest, lower, passed=smallest >= lower * (1.0 - GAP_SLACK))
        report.add("max-gap", largest, upper, passed=largest <= upper * (1.0 + GAP_SLACK))

    rng = np.random.default_rng(seed)
    probes = rng.uniform(lo, hi, size=n_probes)
    bound = INVERSE_SQUARE_CONSTANT * lipschitz**2
    worst = max(inverse_square_sum(ps, float(x)) for x in probes) if ps.count > 1 else 0.0
    report.add("inverse-square", worst, bound, passed=worst <= bound)
    return report


def reconstruct(ps: ParticleSystem, layer: LayerProfile, grid: Grid1D) -> ScalarField:
    """Σ_i εφ((x - x_i)/(εδ)) + εM_ε on the nodes of ``grid``.

    Used in:
    - solvers.py
    - studies.py
    """
    eps, width = ps.epsilon, ps.epsilon * ps.delta
    x = grid.nodes
    values = np.full(grid.n, ps.base_level)
    for position in ps.positions:
        values += eps * np.asarray(layer.evaluate((x - position) / width))
    return ScalarField(
        grid=grid,
        values=values,
        left_limit=ps.base_level,
        right_limit=ps.base_level + eps * ps.count,
        tail_power=1.0,
        monotone=is_nondecreasing(values),
    )


# Discrete dislocation dynamics


def _check_ordered(positions: np.ndarray) -> None:
    if np.any(np.diff(positions) <= 0):
        msg = "Dislocation positions must be strictly increasing (coincident or crossed positions)"
        raise ValueError(msg)


def ddd_rhs(positions: Sequence[float] | np.ndarray, c0: float) -> np.ndarray:
    """ẏ_i = (c₀/π) Σ_{j ≠ i} 1/(y_i - y_j)."""
    y = np.asarray(positions, dtype=float)
    _check_ordered(y)
    return _pairwise_velocity(y, c0)


def _pairwise_velocity(y: np.ndarray, c0: float) -> np.ndarray:
    diff = np.subtract.outer(y, y)
    np.fill_diagonal(diff, np.inf)
    return (c0 / math.pi) * np.sum(1.0 / diff, axis=1)


def ddd_max_stable_dt(positions: Sequence[float] | np.ndarray, c0: float) -> float:
    """Repulsion CFL 0.1 · (min gap)² · π / c₀; unbounded for a single dislocation."""
    y = np.asarray(positions, dtype=float)
    if y.size < 2:  # noqa: PLR2004
        return math.inf
    gap = float(np.min(np.diff(y)))
    return DDD_CFL_FACTOR * gap**2 * math.pi / c0


def _sample_grid(T: float, sample_times: Sequence[float] | None) -> np.ndarray:
    if sample_times is None or len(sample_times) == 0:
        return np.linspace(0.0, T, DEFAULT_SAMPLE_COUNT + 1) if T > 0 else np.array([0.0])
    times = np.asarray(sorted(set(float(t) for t in sample_times)), dtype=float)
    if times[0] < 0 or times[-1] > T:
        msg = f"Sample times must lie in [0, {T}], got [{times[0]}, {times[-1]}]"
        raise ValueError(msg)
    return times


def _rk4_step(y: np.ndarray, c0: float, dt: float) -> np.ndarray:
    k1 = _pairwise_velocity(y, c0)
    k2 = _pairwise_velocity(y + 0.5 * dt * k1, c0)
    k3 = _pairwise_velocity(y + 0.5 * dt * k2, c0)
    k4 = _pairwise_velocity(y + dt * k3, c0)
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def ddd_integrate(
    positions0: Sequence[float] | np.ndarray,
    c0: float,
    dt: float,
    T: float,
    sample_times: Sequence[float] | None = None,
) -> Trajectory:
    """Integrate the dislocation system with classical fourth-order Runge-Kutta.

    Steps never exceed ``dt`` and land exactly on every sample time.

    Used in:
    - studies.py
    """
    y = np.array(positions0, dtype=float)
    _check_ordered(y)
    if not c0 > 0 or not dt > 0 or T < 0:
        msg = f"Need c0 > 0, dt > 0 and T >= 0, got ({c0}, {dt}, {T})"
        raise ValueError(msg)
    budget = ddd_max_stable_dt(y, c0)
    if dt > budget:
        msg = f"Time step dt={dt:.3g} exceeds the repulsion CFL budget {budget:.3g}"
        raise ValueError(msg)

    times = _sample_grid(T, sample_times)
    samples = np.empty((times.size, y.size))
    t, step = 0.0, 0
    for k, target in enumerate(times):
        span = target - t
        if span > 0:
            substeps = math.ceil(span / dt - INDEX_SLACK)
            h = span / substeps
            for _ in range(substeps):
                y = _rk4_step(y, c0, h)
                step += 1
                t_now = t + h
                gaps = np.diff(y)
                if np.any(gaps <= 0):
                    pair = int(np.argmin(gaps))
                    msg = f"Ordering violated at step {step}, t={t_now:.6g}: y_{pair + 1} >= y_{pair + 2}"
                    raise RuntimeError(msg)
                t = t_now
                if step % PROGRESS_EVERY == 0:
                    logger.debug(f"DDD step {step}, t={t:.4g}, min gap {float(np.min(gaps)) if gaps.size else 0:.4g}")
            t = float(target)
        samples[k] = y
    return Trajectory(times=times, positions=samples)


def two_body_separation(s0: float, c0: float, t: float | np.ndarray) -> float | np.ndarray:
    """Closed form √(s₀² + 4c₀t/π) of the two-dislocation separation."""
    value = np.sqrt(s0**2 + 4.0 * c0 * np.asarray(t, dtype=float) / math.pi)
    return float(value) if np.ndim(t) == 0 else value
