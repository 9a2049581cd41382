#!/usr/bin/env python3
# this_file: src/orowan_lab/solvers.py

"""Explicit time stepping of the microscopic and macroscopic equations."""

from __future__ import annotations

import math
from collections.abc import Sequence

import numpy as np
from loguru import logger
from scipy.integrate import cumulative_trapezoid

from .models import (
    Grid1D,
    LayerProfile,
    MacroRun,
    MacroState,
    MicroRun,
    MicroState,
    OperatorBackend,
    ParticleSystem,
    ScalarField,
    ValidationReport,
    is_nondecreasing,
)
from .nonlocal_ops import hilbert_apply, i1_apply
from .numerics import central_derivative, tail_masses
from .particles import level_points, reconstruct
from .potential import PotentialSpec

# Fractions of the reaction and transport time scales allowed per micro step
REACTION_CFL = 0.2
TRANSPORT_CFL = 0.5
# Fraction of the cell crossing time allowed per macro step
MACRO_CFL = 0.5
# Steps may exceed the budget by this relative amount
CFL_SLACK = 1e-12
BRACKET_SLACK = 1e-9
BRACKET_TOLERANCE = 1e-12
# Clipped mass above this fraction of the total is reported as a warning
CLIP_WARNING_FRACTION = 1e-10
PROGRESS_EVERY = 5000
MASS_DRIFT_TOLERANCE = 1e-3


def _check_budget(dt: float, budget: float, kind: str) -> None:
    if not dt > 0:
        msg = f"Time step must be positive, got {dt}"
        raise ValueError(msg)
    if dt > budget * (1.0 + CFL_SLACK):
        msg = f"{kind} CFL violation: dt={dt:.6g} exceeds the feasible budget {budget:.6g}"
        raise ValueError(msg)


def _schedule(T: float, snapshot_times: Sequence[float] | None) -> list[float]:
    if T < 0:
        msg = f"Final time must be non-negative, got {T}"
        raise ValueError(msg)
    times = sorted({0.0, float(T)} if not snapshot_times else {float(t) for t in snapshot_times})
    if times[0] < 0 or times[-1] > T:
        msg = f"Snapshot times must lie in [0, {T}], got [{times[0]}, {times[-1]}]"
        raise ValueError(msg)
    return times


# Microscopic model


def micro_init(
    source: ScalarField | ParticleSystem,
    epsilon: float,
    delta: float,
    *,
    layer: LayerProfile | None = None,
    grid: Grid1D | None = None,
) -> MicroState:
    """Initial micro state from a monotone profile or from level points.

    A field is used as given unless ``layer`` is supplied, in which case it is replaced by the
    layered reconstruction of its level points. A ParticleSystem needs ``layer`` and ``grid``.

    Used in:
    - studies.py
    """
    if isinstance(source, ParticleSystem):
        if layer is None or grid is None:
            msg = "A particle system needs a layer and a grid to build the micro state"
            raise ValueError(msg)
        return MicroState(u=reconstruct(source, layer, grid), epsilon=source.epsilon, delta=source.delta)

    if not is_nondecreasing(source.values):
        msg = "Micro initial data must be non-decreasing"
        raise ValueError(msg)
    if layer is None or np.ptp(source.values) == 0.0:
        u = source if source.monotone else source.with_values(source.values, monotone=True)
        if grid is not None and grid != source.grid:
            msg = f"Grid mismatch: {source.grid} vs {grid}"
            raise ValueError(msg)
        return MicroState(u=u, epsilon=epsilon, delta=delta)
    ps = level_points(source, epsilon, delta)
    return MicroState(u=reconstruct(ps, layer, grid or source.grid), epsilon=epsilon, delta=delta)


def micro_stable_dt(state: MicroState, p: PotentialSpec) -> float:
    """min(0.2 εδ²/max|W''|, 0.5 δh/π)."""
    reaction = REACTION_CFL * state.epsilon * state.delta**2 / p.max_abs(2)
    transport = TRANSPORT_CFL * state.delta * state.u.grid.h / math.pi
    return min(reaction, transport)


def micro_step(state: MicroState, p: PotentialSpec, dt: float) -> MicroState:
    """One explicit step of δ u_t = I₁[u] - W'(u/ε)/δ; the edge nodes are held.

    Used in:
    - micro_run
    """
    _check_budget(dt, micro_stable_dt(state, p), "Micro")
    u = state.u
    stress = i1_apply(u, OperatorBackend.PV).values
    reaction = np.asarray(p.first_derivative(u.values / state.epsilon)) / state.delta
    values = u.values + (dt / state.delta) * (stress - reaction)
    values[0], values[-1] = u.values[0], u.values[-1]
    new_u = u.with_values(values, monotone=is_nondecreasing(values))
    return MicroState(u=new_u, epsilon=state.epsilon, delta=state.delta, t=state.t + dt)


def perron_constant(u0: ScalarField, p: PotentialSpec, delta: float) -> float:
    """C = (4δ/π)‖u₀‖_{C^{1,1}} + ‖W'‖_∞ of the barrier |u(t) - u₀| ≤ Ct/δ²."""
    first = central_derivative(u0).values
    second = np.gradient(first, u0.grid.h, edge_order=2)
    norm = float(np.max(np.abs(u0.values)) + np.max(np.abs(first)) + np.max(np.abs(second)))
    return 4.0 * delta / math.pi * norm + p.max_abs(1)


def _brackets(u0: ScalarField, epsilon: float) -> tuple[float, float]:
    low = min(u0.left_limit, float(np.min(u0.values)))
    high = max(u0.right_limit, float(np.max(u0.values)))
    return epsilon * math.floor(low / epsilon + BRACKET_SLACK), epsilon * math.ceil(high / epsilon - BRACKET_SLACK)


def micro_run(
    state: MicroState,
    p: PotentialSpec,
    T: float,
    snapshot_times: Sequence[float] | None = None,
    *,
    cfl_safety: float = 1.0,
) -> MicroRun:
    """Advance the micro state to ``T`` at the CFL step, landing on every snapshot time.

    The report checks monotonicity after every step, the εℤ brackets of the initial data
    and the barrier |u(t) - u₀| ≤ Ct/δ² at each snapshot.

    Used in:
    - studies.py
    """
    times = _schedule(T, snapshot_times)
    budget = micro_stable_dt(state, p)
    dt = cfl_safety * budget
    u0 = state.u
    low, high = _brackets(u0, state.epsilon)
    barrier = perron_constant(u0, p, state.delta)

    monotone = True
    lowest, highest = float(np.min(u0.values)), float(np.max(u0.values))
    barrier_ratio = 0.0
    snapshots: list[MicroState] = []
    steps = 0
    current = state
    for target in times:
        span = target - current.t
        if span > 0:
            substeps = math.ceil(span / dt - CFL_SLACK)
            h = span / substeps
            for _ in range(substeps):
                current = micro_step(current, p, h)
                steps += 1
                monotone = monotone and current.u.monotone
                lowest = min(lowest, float(np.min(current.u.values)))
                highest = max(highest, float(np.max(current.u.values)))
                if steps % PROGRESS_EVERY == 0:
                    logger.debug(f"Micro step {steps}, t={current.t:.4g}, ε={state.epsilon}, δ={state.delta}")
            current = MicroState(u=current.u, epsilon=current.epsilon, delta=current.delta, t=target)
        if current.t > 0:
            drift = float(np.max(np.abs(current.u.values - u0.values)))
            barrier_ratio = max(barrier_ratio, drift / (barrier * current.t / state.delta**2))
        snapshots.append(current)

    report = ValidationReport("micro")
    report.add("monotone", float(monotone), 1.0, passed=monotone)
    scale = max(abs(low), abs(high), 1.0) * BRACKET_TOLERANCE
    report.add("lower-bracket", lowest, low, passed=lowest >= low - scale, note="ε·floor(inf u0/ε)")
    report.add("upper-bracket", highest, high, passed=highest <= high + scale, note="ε·ceil(sup u0/ε)")
    report.add("barrier", barrier_ratio, 1.0, passed=barrier_ratio <= 1.0, note=f"C={barrier:.6g}")
    logger.info(f"Micro run to T={T}: {steps} steps at dt={dt:.3g} (ε={state.epsilon}, δ={state.delta})")
    return MicroRun(final=current, snapshots=snapshots, steps=steps, dt=dt, cfl_bound=budget, report=report)


def rescale_to_unit_scale(u: ScalarField, epsilon: float, delta: float) -> ScalarField:
    """v(x) = u(εδx)/ε, the layer-scale view of a micro field at a fixed time.

    Times map as t_unit = t/(εδ²).
    """
    scale = epsilon * delta
    grid = Grid1D(u.grid.center / scale, u.grid.half_width / scale, u.grid.n)
    return ScalarField(
        grid=grid,
        values=u.values / epsilon,
        left_limit=u.left_limit / epsilon,
        right_limit=u.right_limit / epsilon,
        tail_power=u.tail_power,
        monotone=u.monotone,
    )


def rescale_from_unit_scale(v: ScalarField, epsilon: float, delta: float) -> ScalarField:
    """u(x) = εv(x/(εδ)), the inverse of rescale_to_unit_scale."""
    scale = epsilon * delta
    grid = Grid1D(v.grid.center * scale, v.grid.half_width * scale, v.grid.n)
    return ScalarField(
        grid=grid,
        values=v.values * epsilon,
        left_limit=v.left_limit * epsilon,
        right_limit=v.right_limit * epsilon,
        tail_power=v.tail_power,
        monotone=v.monotone,
    )


# Macroscopic model


def _slip_from_density(f: ScalarField, template: ScalarField) -> ScalarField:
    values = template.values[0] + cumulative_trapezoid(f.values, dx=f.grid.h, initial=0.0)
    return ScalarField(
        grid=f.grid,
        values=values,
        left_limit=template.left_limit,
        right_limit=template.right_limit,
        tail_power=template.tail_power,
        monotone=True,
    )


def _density(grid: Grid1D, values: np.ndarray, tail_power: float | None) -> ScalarField:
    return ScalarField(grid=grid, values=values, left_limit=0.0, right_limit=0.0, tail_power=tail_power)


def macro_init(u0: ScalarField, c0: float) -> MacroState:
    """Macro state from a monotone profile: f = max(u₀', 0) with mass sup u₀ - inf u₀.

    Used in:
    - studies.py
    """
    if not c0 > 0:
        msg = f"Mobility c0 must be positive, got {c0}"
        raise ValueError(msg)
    if not is_nondecreasing(u0.values):
        msg = "Macro initial data must be non-decreasing"
        raise ValueError(msg)
    derivative = central_derivative(u0)
    f = _density(u0.grid, np.clip(derivative.values, 0.0, None), derivative.tail_power)
    left_tail, right_tail = tail_masses(f)
    target = (u0.right_limit - u0.left_limit) - left_tail - right_tail
    mass = float(np.sum(f.values) * u0.grid.h)
    if mass > 0:
        f = f.with_values(f.values * (target / mass))
    base = u0.with_values(np.full(u0.grid.n, u0.left_limit + left_tail), monotone=True)
    return MacroState(u=_slip_from_density(f, base), f=f, c0=c0)


def _velocity(f: ScalarField, c0: float) -> np.ndarray:
    return -c0 * hilbert_apply(f, OperatorBackend.PV).values


def macro_stable_dt(state: MacroState) -> float:
    """0.5 h/(c₀ max|H[f]|); unbounded when f vanishes."""
    speed = float(np.max(np.abs(_velocity(state.f, state.c0))))
    if speed == 0.0:
        return math.inf
    return MACRO_CFL * state.f.grid.h / speed


def _transport(f: ScalarField, c0: float) -> np.ndarray:
    """-∂_x F with the upwind interface flux F = a⁺f_j + a⁻f_{j+1} and closed ends."""
    a = _velocity(f, c0)
    face = 0.5 * (a[:-1] + a[1:])
    flux = np.maximum(face, 0.0) * f.values[:-1] + np.minimum(face, 0.0) * f.values[1:]
    padded = np.concatenate([[0.0], flux, [0.0]])
    return -np.diff(padded) / f.grid.h


def _clip_density(values: np.ndarray, mass: float) -> np.ndarray:
    negative = values < 0
    if not np.any(negative):
        return values
    clipped = float(-np.sum(values[negative]))
    values = np.where(negative, 0.0, values)
    total = float(np.sum(values))
    if total > 0:
        values *= mass / total
    if clipped > CLIP_WARNING_FRACTION * max(mass, 1e-300):
        logger.warning(f"Clipped negative density of total {clipped:.3g} (mass {mass:.6g})")
    return values


def macro_step(state: MacroState, dt: float) -> MacroState:
    """One Heun step of ∂_t f = c₀ ∂_x(f H[f]) in conservative upwind form; u is rebuilt from f.

    Used in:
    - macro_run
    """
    _check_budget(dt, macro_stable_dt(state), "Macro")
    f = state.f
    total = float(np.sum(f.values))
    stage = f.with_values(f.values + dt * _transport(f, state.c0))
    values = 0.5 * (f.values + stage.values + dt * _transport(stage, state.c0))
    new_f = f.with_values(_clip_density(values, total))
    return MacroState(u=_slip_from_density(new_f, state.u), f=new_f, c0=state.c0, t=state.t + dt)


def macro_run(
    state: MacroState,
    T: float,
    snapshot_times: Sequence[float] | None = None,
    *,
    cfl_safety: float = 1.0,
    edge_tolerance: float = 0.02,
) -> MacroRun:
    """Advance the macro state to ``T`` with an adaptive CFL step.

    The report checks mass drift, f ≥ 0, monotone u and the edge values of u at each snapshot.

    Used in:
    - studies.py
    """
    times = _schedule(T, snapshot_times)
    mass0 = state.mass
    left0, right0 = float(state.u.values[0]), float(state.u.values[-1])
    inf_u0, sup_u0 = state.u.left_limit, state.u.right_limit
    snapshots: list[MacroState] = []
    steps = 0
    smallest_dt = math.inf
    smallest_budget = macro_stable_dt(state)
    edge_error = 0.0
    min_density = float(np.min(state.f.values))
    current = state
    for target in times:
        while current.t < target:
            budget = macro_stable_dt(current)
            smallest_budget = min(smallest_budget, budget)
            dt = cfl_safety * budget
            remaining = target - current.t
            if dt >= remaining:
                current = macro_step(current, remaining)
                current = MacroState(u=current.u, f=current.f, c0=current.c0, t=target)
            else:
                current = macro_step(current, dt)
                smallest_dt = min(smallest_dt, dt)
            steps += 1
            min_density = min(min_density, float(np.min(current.f.values)))
            if steps % PROGRESS_EVERY == 0:
                logger.debug(f"Macro step {steps}, t={current.t:.4g}, mass={current.mass:.10g}")
        edge_error = max(
            edge_error, abs(float(current.u.values[0]) - inf_u0), abs(float(current.u.values[-1]) - sup_u0)
        )
        snapshots.append(current)

    report = ValidationReport("macro")
    drift = abs(current.mass - mass0) / mass0 if mass0 > 0 else abs(current.mass)
    report.add("mass-drift", drift, MASS_DRIFT_TOLERANCE, passed=drift <= MASS_DRIFT_TOLERANCE)
    report.add("nonnegative-density", min_density, 0.0, passed=min_density >= 0.0)
    monotone = all(s.u.monotone and is_nondecreasing(s.u.values) for s in snapshots)
    report.add("monotone", float(monotone), 1.0, passed=monotone)
    report.add(
        "edge-limits",
        edge_error,
        edge_tolerance,
        passed=edge_error <= edge_tolerance,
        note=f"edges start at ({left0:.6g}, {right0:.6g})",
    )
    dt_used = smallest_dt if math.isfinite(smallest_dt) else (times[-1] - times[0])
    logger.info(f"Macro run to T={T}: {steps} steps, smallest dt={dt_used:.3g}, c0={state.c0:.6g}")
    return MacroRun(
        final=current, snapshots=snapshots, steps=steps, dt=dt_used, cfl_bound=smallest_budget, report=report
    )
