#!/usr/bin/env python3
# this_file: src/orowan_lab/studies.py

"""Experiment studies: each one runs a configured sweep and returns a table plus acceptance gates."""

from __future__ import annotations

import math
import time
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import pandas as pd
from loguru import logger

from .layer import (
    compute_c0,
    layer_from_closed_form,
    nabarro_closed_form,
    solve_corrector,
    verify_corrector_tails,
    verify_layer_tails,
)
from .models import (
    ConvergenceReport,
    ConvergenceRow,
    Grid1D,
    InitialConfig,
    InitialKind,
    LayerProfile,
    MacroRun,
    MacroState,
    OperatorBackend,
    ParticleSystem,
    PotentialKind,
    ScalarField,
    SimulationConfig,
    StudyName,
    StudyResult,
    ValidationReport,
)
from .nonlocal_ops import (
    i1_apply,
    i1_pointwise,
    nearest_particle,
    particle_sum_full,
    particle_sum_truncated,
    short_window_sum,
)
from .numerics import grid_for_resolution, resample, sample_field, sup_distance
from .particles import (
    ddd_integrate,
    layer_centres,
    level_points,
    reconstruct,
    spacing_bounds_check,
    two_body_separation,
)
from .potential import PotentialSpec, validate_potential
from .reporting import read_field, read_positions, snapshot_frame
from .solvers import macro_init, macro_run, micro_init, micro_run

# Sup error of the solved layer against the closed form, measured on |x| ≤ LAYER_WINDOW
LAYER_TOLERANCE = 1e-3
LAYER_WINDOW = 20.0
C0_TOLERANCE = 1e-3
CENTRE_OF_MASS_TOLERANCE = 1e-10
TWO_BODY_TOLERANCE = 1e-6
DECOMPOSITION_TOLERANCE = 1e-12
# Half-level drift of a single rescaled layer, per unit of DDD time
SINGLE_LAYER_DRIFT_RATE = 1e-3
# Off-particle probes keep at least ε/(4L) from every particle
OFF_PARTICLE_FRACTION = 0.25
# Grid-max and fine-probe-max of the reconstruction error may differ by this factor
UNIFORMITY_FACTOR = 2.0
CENTRE_DEVIATION_CONSTANT = 1.0
# Layered micro data of the DDD comparison keeps this many separations inside the grid
DDD_GRID_MARGIN = 4.0
# Relative slack when two sweep points are compared as "a quartering"
QUARTER_SLACK = 1e-9


@dataclass(frozen=True)
class InitialProfile:
    """An initial slip profile: exact callable, far-field limits and tail."""

    func: Callable[[np.ndarray], np.ndarray]
    left_limit: float
    right_limit: float
    tail_power: float | None

    def sample(self, grid: Grid1D) -> ScalarField:
        return sample_field(
            grid,
            self.func,
            left_limit=self.left_limit,
            right_limit=self.right_limit,
            tail_power=self.tail_power,
            monotone=True,
        )


def logistic_profile(
    center: float = 0.0, width: float = 1.0, amplitude: float = 1.0, offset: float = 0.0
) -> InitialProfile:
    """offset + amplitude · (1 + tanh((x - center)/width))/2."""

    def func(x: np.ndarray) -> np.ndarray:
        return offset + amplitude * 0.5 * (1.0 + np.tanh((np.asarray(x, dtype=float) - center) / width))

    return InitialProfile(func, offset, offset + amplitude, None)


def arctan_profile(
    center: float = 0.0, width: float = 1.0, amplitude: float = 1.0, offset: float = 0.0
) -> InitialProfile:
    """offset + amplitude · (1/2 + arctan((x - center)/width)/π)."""

    def func(x: np.ndarray) -> np.ndarray:
        return offset + amplitude * (0.5 + np.arctan((np.asarray(x, dtype=float) - center) / width) / math.pi)

    return InitialProfile(func, offset, offset + amplitude, 1.0)


def initial_profile(config: InitialConfig) -> InitialProfile:
    """Initial profile named by the ``initial`` config section.

    Used in:
    - every time-dependent study
    """
    if config.kind is InitialKind.LOGISTIC:
        return logistic_profile(config.center, config.width, config.amplitude, config.offset)
    if config.kind is InitialKind.ARCTAN:
        return arctan_profile(config.center, config.width, config.amplitude, config.offset)
    field = read_field(config.path or "")
    return InitialProfile(
        lambda x: np.asarray(field.evaluate(x)), field.left_limit, field.right_limit, field.tail_power
    )


def _gates_from(report: ValidationReport, title: str, prefix: str = "") -> ValidationReport:
    gates = ValidationReport(title)
    gates.extend(report, prefix)
    return gates


def _strict_decrease(gates: ValidationReport, label: str, values: np.ndarray) -> None:
    steps = np.diff(values)
    worst = float(np.max(steps)) if steps.size else -math.inf
    gates.add(label, worst, 0.0, passed=bool(steps.size == 0 or worst < 0), note="max successive change")


def _map(workers: int, func: Callable, items: list) -> list:
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


# Layer and mobility


def run_layer_study(config: SimulationConfig, p: PotentialSpec, layer: LayerProfile) -> StudyResult:
    """Validate W, the solved layer and its corrector.

    Used in:
    - tool.py
    """
    gates = _gates_from(validate_potential(p), "layer", "potential/")
    gates.extend(verify_layer_tails(layer), "layer/")
    x = layer.field.nodes
    columns: dict[str, np.ndarray] = {"x": x, "phi": layer.field.values, "phi_prime": layer.derivative.values}
    if p.kind is PotentialKind.CLASSICAL and p.d is not None:
        window = np.abs(x) <= LAYER_WINDOW
        exact = np.asarray(nabarro_closed_form(p.d, x))
        error = float(np.max(np.abs(layer.field.values[window] - exact[window])))
        note = f"sup |φ - φ_d| on |x| ≤ {LAYER_WINDOW:g}"
        gates.add("closed-form", error, LAYER_TOLERANCE, passed=error <= LAYER_TOLERANCE, note=note)
        columns["phi_exact"] = exact

    settings = config.layer
    corrector = solve_corrector(
        p,
        layer,
        settings.stress_l,
        tolerance=settings.tolerance,
        max_sweeps=settings.max_sweeps,
        relaxation=settings.relaxation,
    )
    gates.extend(verify_corrector_tails(corrector, settings.tolerance), "corrector/")
    columns["psi"] = corrector.field.values
    summary = {
        "alpha": layer.alpha,
        "c0": layer.c0,
        "k1": layer.tail_constant_k1,
        "layer_residual": layer.residual,
        "layer_sweeps": layer.sweeps,
        "k2": corrector.k2,
        "k3": corrector.k3,
        "corrector_sweeps": corrector.sweeps,
        "solvability_defect": corrector.solvability_defect,
    }
    return StudyResult(
        name=StudyName.LAYER.value,
        table=pd.DataFrame(columns),
        gates=gates,
        fields={"layer": layer.field, "layer_derivative": layer.derivative, "corrector": corrector.field},
        summary=summary,
    )


def run_c0_study(p: PotentialSpec, layer: LayerProfile, solve: Callable[[Grid1D], LayerProfile]) -> StudyResult:
    """c₀ = 1/∫(φ')² on the configured grid and on the grid with twice the nodes.

    ``solve(grid)`` returns the layer on a grid. The classical potential is also compared
    with the analytic value 2πd.

    Used in:
    - tool.py
    """
    gates = ValidationReport("c0")
    grid = layer.field.grid
    fine = solve(grid.refine(2))
    rows = [
        {"source": "solved", "n": grid.n, "c0": layer.c0},
        {"source": "solved-2x", "n": fine.field.grid.n, "c0": fine.c0},
    ]
    refinement = abs(fine.c0 - layer.c0) / abs(fine.c0)
    gates.add("grid-refinement", refinement, C0_TOLERANCE, passed=refinement <= C0_TOLERANCE)
    if p.kind is PotentialKind.CLASSICAL and p.d is not None:
        exact = 2.0 * math.pi * p.d
        closed = compute_c0(layer_from_closed_form(p.d, grid))
        rows.append({"source": "closed-form", "n": grid.n, "c0": closed})
        for row in rows:
            row["relative_error"] = abs(row["c0"] - exact) / exact
        error = rows[0]["relative_error"]
        gates.add("analytic", error, C0_TOLERANCE, passed=error <= C0_TOLERANCE, note=f"2πd = {exact:.10g}")
    logger.info(f"c0 = {layer.c0:.10g} (n={grid.n}), {fine.c0:.10g} (n={fine.field.grid.n})")
    return StudyResult(
        name=StudyName.C0.value,
        table=pd.DataFrame(rows),
        gates=gates,
        summary={"c0": layer.c0, "c0_refined": fine.c0},
    )


# Time-dependent models


def micro_grid(config: SimulationConfig, epsilon: float, delta: float) -> Grid1D:
    """Power-of-two grid resolving the layer width εδ with the configured points per layer."""
    settings = config.micro
    h_max = epsilon * delta / settings.points_per_layer
    return grid_for_resolution(0.0, settings.half_width, h_max, max_n=settings.max_n)


def run_micro_study(config: SimulationConfig, p: PotentialSpec, layer: LayerProfile) -> StudyResult:
    """Run the microscopic model from the configured initial profile.

    Used in:
    - tool.py
    """
    settings = config.micro
    eps, delta = settings.epsilon, settings.delta
    grid = micro_grid(config, eps, delta)
    u0 = initial_profile(config.initial).sample(grid)
    state = micro_init(u0, eps, delta, layer=layer if settings.layered else None, grid=grid)
    run = micro_run(state, p, settings.T, settings.snapshot_times, cfl_safety=settings.cfl_safety)
    table = pd.DataFrame(
        [
            {
                "epsilon": eps,
                "delta": delta,
                "n": grid.n,
                "h": grid.h,
                "T": settings.T,
                "steps": run.steps,
                "dt": run.dt,
                "cfl_bound": run.cfl_bound,
            }
        ]
    )
    return StudyResult(
        name=StudyName.MICRO.value,
        table=table,
        gates=_gates_from(run.report, "micro"),
        tables={"snapshots": snapshot_frame(run.snapshots)},
        fields={"u_final": run.final.u},
        summary={"epsilon": eps, "delta": delta, "steps": run.steps, "dt": run.dt, "snapshots": run.snapshots},
    )


def _macro(config: SimulationConfig, c0: float, T: float, times: list[float], grid: Grid1D | None = None) -> MacroRun:
    settings = config.macro
    grid = grid or settings.grid.to_grid()
    u0 = initial_profile(config.initial).sample(grid)
    return macro_run(
        macro_init(u0, c0), T, times, cfl_safety=settings.cfl_safety, edge_tolerance=settings.edge_tolerance
    )


def _macro_rows(snapshots: list[MacroState]) -> pd.DataFrame:
    rows = []
    for state in snapshots:
        f = state.f
        mass = state.mass
        centre = float(np.sum(f.nodes * f.values) * f.grid.h / mass) if mass > 0 else math.nan
        rows.append(
            {
                "t": state.t,
                "mass": mass,
                "max_f": float(np.max(f.values)),
                "centre_of_mass": centre,
                "u_left": float(state.u.values[0]),
                "u_right": float(state.u.values[-1]),
            }
        )
    return pd.DataFrame(rows)


def run_macro_study(config: SimulationConfig, layer: LayerProfile) -> StudyResult:
    """Run the macroscopic model; c₀ defaults to the layer mobility.

    Used in:
    - tool.py
    """
    settings = config.macro
    c0 = settings.c0 or layer.c0
    run = _macro(config, c0, settings.T, settings.snapshot_times)
    table = _macro_rows(run.snapshots)
    table["dt"] = run.dt
    table["cfl_bound"] = run.cfl_bound
    return StudyResult(
        name=StudyName.MACRO.value,
        table=table,
        gates=_gates_from(run.report, "macro"),
        tables={"snapshots": snapshot_frame(run.snapshots)},
        fields={"u_final": run.final.u, "f_final": run.final.f},
        summary={"c0": c0, "steps": run.steps, "dt": run.dt, "snapshots": run.snapshots},
    )


# Discrete dislocation dynamics


def _ddd_positions(config: SimulationConfig) -> list[float]:
    settings = config.ddd
    if settings.positions_csv:
        return read_positions(settings.positions_csv)
    return list(settings.positions)


def _ddd_samples(config: SimulationConfig) -> list[float] | None:
    times = config.ddd.sample_times
    return list(times) if times else None


def run_ddd_vs_micro(
    config: SimulationConfig,
    p: PotentialSpec,
    layer: LayerProfile,
    positions: list[float],
    c0: float,
) -> tuple[pd.DataFrame, ValidationReport]:
    """Compare DDD with the level-point dynamics of the micro model.

    Layers start at εy⁰ᵢ; micro time t = ετ and layer centres x/ε are matched to y(τ).

    Used in:
    - run_ddd_study
    """
    settings = config.ddd
    eps, delta = settings.epsilon, settings.delta
    y0 = np.asarray(sorted(positions), dtype=float)
    trajectory = ddd_integrate(y0, c0, settings.dt, settings.T, _ddd_samples(config))
    reach = eps * (float(np.max(np.abs(trajectory.positions))) + DDD_GRID_MARGIN)
    half_width = max(config.micro.half_width, reach)
    grid = grid_for_resolution(
        0.0, half_width, eps * delta / config.micro.points_per_layer, max_n=config.micro.max_n
    )
    ps = ParticleSystem(epsilon=eps, delta=delta, positions=eps * y0, m_index=0)
    state = micro_init(ps, eps, delta, layer=layer, grid=grid)
    micro_times = [eps * t for t in trajectory.times]
    run = micro_run(state, p, micro_times[-1], micro_times, cfl_safety=config.micro.cfl_safety)

    tracked = np.array([layer_centres(s.u, eps, 0.0, count=y0.size) / eps for s in run.snapshots])
    deviation = np.abs(tracked - trajectory.positions)
    frame = pd.DataFrame({"tau": trajectory.times})
    for i in range(y0.size):
        frame[f"ddd_{i + 1}"] = trajectory.positions[:, i]
        frame[f"micro_{i + 1}"] = tracked[:, i]
    frame["max_deviation"] = deviation.max(axis=1)
    frame["dt"] = run.dt
    frame["cfl_bound"] = run.cfl_bound

    gates = ValidationReport("ddd-vs-micro")
    gates.extend(run.report, "micro/")
    if y0.size >= 2:  # noqa: PLR2004
        span_ddd = trajectory.positions[-1, -1] - trajectory.positions[-1, 0]
        span_micro = tracked[-1, -1] - tracked[-1, 0]
        relative = abs(span_micro - span_ddd) / span_ddd
        gates.add("separation", relative, settings.tolerance, passed=relative <= settings.tolerance)
    else:
        drift = float(np.max(deviation))
        rate = drift / settings.T if settings.T > 0 else 0.0
        gates.add(
            "stationary",
            rate,
            SINGLE_LAYER_DRIFT_RATE,
            passed=rate <= SINGLE_LAYER_DRIFT_RATE,
            note="half-level drift of the single layer per unit time",
        )
    if y0.size % 2 == 1 and np.allclose(y0, -y0[::-1]):
        middle = float(np.max(np.abs(tracked[:, y0.size // 2])))
        limit = grid.h / eps
        gates.add("middle-drift", middle, limit, passed=middle <= limit, note="symmetric data")
    return frame, gates


def run_ddd_study(config: SimulationConfig, p: PotentialSpec, layer: LayerProfile) -> StudyResult:
    """Integrate the dislocation system; optionally compare with the micro model.

    Used in:
    - tool.py
    """
    settings = config.ddd
    c0 = settings.c0 or layer.c0
    positions = _ddd_positions(config)
    trajectory = ddd_integrate(positions, c0, settings.dt, settings.T, _ddd_samples(config))
    gates = ValidationReport("ddd")
    centre = trajectory.positions.mean(axis=1)
    drift = float(np.max(np.abs(centre - centre[0])))
    gates.add("centre-of-mass", drift, CENTRE_OF_MASS_TOLERANCE, passed=drift <= CENTRE_OF_MASS_TOLERANCE)
    ordered = bool(np.all(np.diff(trajectory.positions, axis=1) > 0))
    gates.add("ordering", float(ordered), 1.0, passed=ordered)
    if len(positions) == 2:  # noqa: PLR2004
        s0 = abs(positions[1] - positions[0])
        exact = np.asarray(two_body_separation(s0, c0, trajectory.times))
        separation = np.abs(trajectory.positions[:, 1] - trajectory.positions[:, 0])
        error = float(np.max(np.abs(separation - exact) / exact))
        gates.add("two-body", error, TWO_BODY_TOLERANCE, passed=error <= TWO_BODY_TOLERANCE)

    tables: dict[str, pd.DataFrame] = {}
    if settings.compare_micro:
        frame, comparison = run_ddd_vs_micro(config, p, layer, positions, c0)
        tables["ddd_vs_micro"] = frame
        gates.extend(comparison, "micro-comparison/")
    return StudyResult(
        name=StudyName.DDD.value,
        table=trajectory.to_frame(),
        gates=gates,
        tables=tables,
        summary={"c0": c0, "dt": settings.dt, "trajectory": trajectory},
    )


# Particle approximation and reconstruction


def _off_particle_probes(
    ps: ParticleSystem, window: tuple[float, float], count: int, clearance: float, rng: np.random.Generator
) -> np.ndarray:
    probes: list[float] = []
    lo, hi = window
    while len(probes) < count:
        candidates = rng.uniform(lo, hi, size=4 * count)
        for x in candidates:
            nearest = ps.positions[nearest_particle(ps, float(x))]
            if abs(nearest - x) >= clearance:
                probes.append(float(x))
                if len(probes) == count:
                    break
    return np.asarray(probes)


def _on_particle_probes(ps: ParticleSystem, window: tuple[float, float], count: int) -> np.ndarray:
    lo, hi = window
    inside = ps.positions[(ps.positions >= lo) & (ps.positions <= hi)]
    if inside.size <= count:
        return inside
    picks = np.linspace(0, inside.size - 1, count).round().astype(int)
    return inside[np.unique(picks)]


def run_particle_approx_study(config: SimulationConfig) -> StudyResult:
    """Error of the truncated particle sum against the I₁ quadrature oracle along the ε sweep.

    With r = c·ε^(1/2) the error is expected to halve per quartering of ε. On-particle
    and off-particle probes are reported separately; the error column is their maximum.

    Used in:
    - tool.py
    """
    settings = config.approx
    profile = initial_profile(config.initial)
    grid = Grid1D(config.initial.center, settings.half_width, settings.n)
    field = profile.sample(grid)
    slope = np.gradient(field.values, grid.h)
    lipschitz = float(np.max(slope))
    window_mask = grid.window_mask(settings.probe_window)
    slope_floor = float(np.min(slope[window_mask]))
    rng = np.random.default_rng(config.seed)

    def oracle(x: float) -> float:
        return i1_pointwise(lambda y: float(profile.func(np.asarray(y))), x)

    report = ConvergenceReport("approx")
    gates = ValidationReport("approx")
    symmetric = abs(config.initial.center) == 0.0 and config.initial.kind is not InitialKind.CSV
    for eps in settings.epsilons:
        ps = level_points(field, eps, eps)
        r = settings.r_factor * eps**settings.r_exponent
        clearance = OFF_PARTICLE_FRACTION * eps / lipschitz
        off = _off_particle_probes(ps, settings.probe_window, settings.n_probes, clearance, rng)
        on = _on_particle_probes(ps, settings.probe_window, settings.n_probes)
        error_off = max(abs(particle_sum_truncated(ps, float(x), r) - oracle(float(x))) for x in off)
        error_on = max((abs(particle_sum_truncated(ps, float(x), r) - oracle(float(x))) for x in on), default=0.0)

        identity = 0.0
        for x in off:
            if abs(ps.positions[nearest_particle(ps, float(x))] - x) < r:
                parts = particle_sum_truncated(ps, float(x), r) + short_window_sum(ps, float(x), r)
                identity = max(identity, abs(parts - particle_sum_full(ps, float(x))))
        antisymmetry = math.nan
        if symmetric:
            antisymmetry = max(
                abs(particle_sum_truncated(ps, float(x), r) + particle_sum_truncated(ps, -float(x), r)) for x in off
            )
        gates.extend(
            spacing_bounds_check(ps, lipschitz, slope_floor, settings.probe_window, seed=config.seed), f"eps={eps:g}/"
        )
        report.rows.append(
            ConvergenceRow(
                epsilon=eps,
                delta=eps,
                error=max(error_off, error_on),
                extras={
                    "r": r,
                    "count": float(ps.count),
                    "error_off_particle": error_off,
                    "error_on_particle": error_on,
                    "decomposition": identity,
                    "antisymmetry": antisymmetry,
                },
            )
        )
        logger.info(f"approx ε={eps:g}: r={r:.4g}, error off {error_off:.4g}, on {error_on:.4g}")

    errors = report.errors
    _strict_decrease(gates, "error-decreasing", errors)
    lo, hi = settings.ratio_bounds
    eps_list = settings.epsilons
    for k in range(len(eps_list) - 1):
        if abs(eps_list[k] / eps_list[k + 1] - 4.0) <= 4.0 * QUARTER_SLACK:
            ratio = errors[k] / errors[k + 1]
            gates.add(f"ratio-{k + 1}", ratio, hi, passed=lo <= ratio <= hi, note=f"admissible [{lo}, {hi}]")
    worst_identity = float(np.max(report.to_frame()["decomposition"]))
    gates.add(
        "decomposition", worst_identity, DECOMPOSITION_TOLERANCE, passed=worst_identity <= DECOMPOSITION_TOLERANCE
    )
    return StudyResult(name=StudyName.APPROX.value, table=report.to_frame(), gates=gates)


def _reconstruction_row(
    config: SimulationConfig, layer: LayerProfile, profile: InitialProfile, pair: tuple[float, float]
) -> ConvergenceRow:
    settings = config.reconstruct
    eps, delta = pair
    start = time.perf_counter()
    grid = grid_for_resolution(
        0.0, config.micro.half_width, eps * delta / settings.points_per_layer, max_n=config.micro.max_n
    )
    v = profile.sample(grid)
    ps = level_points(v, eps, delta)
    rebuilt = reconstruct(ps, layer, grid)
    error = sup_distance(rebuilt, v, settings.window)

    lo, hi = settings.window
    probes = settings.probe_refinement * int(np.count_nonzero(grid.window_mask(settings.window)))
    fine = Grid1D(0.5 * (lo + hi), 0.5 * (hi - lo), max(probes, 8))
    fine_error = sup_distance(reconstruct(ps, layer, fine), profile.sample(fine))
    centres = layer_centres(rebuilt, eps, ps.base_level, count=ps.count)
    centre_deviation = float(np.max(np.abs(centres - ps.positions)))
    far_left = abs(float(rebuilt.values[0]) - ps.base_level)
    distance = float(ps.positions[0] - grid.left)
    return ConvergenceRow(
        epsilon=eps,
        delta=delta,
        error=error,
        wall_time=time.perf_counter() - start,
        extras={
            "n": float(grid.n),
            "count": float(ps.count),
            "error_fine": fine_error,
            "centre_deviation": centre_deviation,
            "far_left": far_left,
            "far_left_bound": eps * (1.0 + delta / distance),
        },
    )


def run_reconstruction_study(config: SimulationConfig, layer: LayerProfile) -> StudyResult:
    """Sup error of Σ εφ((x - x_i)/(εδ)) + εM_ε against the profile along the (ε, δ) sweep.

    Used in:
    - tool.py
    """
    profile = initial_profile(config.initial)
    pairs = [tuple(pair) for pair in config.reconstruct.pairs]
    rows = _map(config.workers, lambda pair: _reconstruction_row(config, layer, profile, pair), pairs)
    report = ConvergenceReport("reconstruct", rows)
    frame = report.to_frame()
    gates = ValidationReport("reconstruct")
    _strict_decrease(gates, "error-decreasing", report.errors)
    for row in report.rows:
        tag = f"eps={row.epsilon:g},delta={row.delta:g}/"
        fine = row.extras["error_fine"]
        spread = max(fine, row.error) / min(fine, row.error) if min(fine, row.error) > 0 else math.inf
        gates.add(f"{tag}uniformity", spread, UNIFORMITY_FACTOR, passed=spread <= UNIFORMITY_FACTOR)
        bound = CENTRE_DEVIATION_CONSTANT * row.epsilon * row.delta
        deviation = row.extras["centre_deviation"]
        gates.add(f"{tag}centres", deviation, bound, passed=deviation <= bound, note="layer centres vs level points")
        far = row.extras["far_left"]
        gates.add(f"{tag}far-left", far, row.extras["far_left_bound"], passed=far <= row.extras["far_left_bound"])
    return StudyResult(name=StudyName.RECONSTRUCT.value, table=frame, gates=gates)


# Multiscale convergence and Orowan proportionality


def _convergence_row(
    config: SimulationConfig,
    p: PotentialSpec,
    layer: LayerProfile,
    profile: InitialProfile,
    reference: ScalarField,
    epsilon: float,
) -> ConvergenceRow:
    settings = config.converge
    delta = settings.delta_rule.delta(epsilon, settings.delta_fixed)
    start = time.perf_counter()
    grid = micro_grid(config, epsilon, delta)
    u0 = profile.sample(grid)
    state = micro_init(u0, epsilon, delta, layer=layer if config.micro.layered else None, grid=grid)
    run = micro_run(state, p, settings.T, cfl_safety=config.micro.cfl_safety)
    error = sup_distance(resample(run.final.u, reference.grid), reference, settings.window)
    logger.info(f"converge ε={epsilon:g}, δ={delta:g}: error {error:.4g} after {run.steps} steps")
    return ConvergenceRow(
        epsilon=epsilon,
        delta=delta,
        error=error,
        wall_time=time.perf_counter() - start,
        dt=run.dt,
        cfl_bound=run.cfl_bound,
        extras={"n": float(grid.n), "steps": float(run.steps), "micro_passed": float(run.report.passed)},
    )


def run_multiscale_convergence(config: SimulationConfig, p: PotentialSpec, layer: LayerProfile) -> StudyResult:
    """sup |u^ε(T) - ū(T)| on the window along the ε sweep with δ from the configured rule.

    The reference ū is the macro solution on a refined grid. Per-ε runs share no state and
    go through a thread pool of ``workers`` threads; rows keep the configured order.

    Used in:
    - tool.py
    """
    settings = config.converge
    profile = initial_profile(config.initial)
    reference_grid = config.macro.grid.to_grid().refine(settings.reference_refinement)
    macro = _macro(config, config.macro.c0 or layer.c0, settings.T, [settings.T], reference_grid)
    reference = macro.final.u
    # Reject infeasible sweeps before any run
    for eps in settings.epsilons:
        delta = settings.delta_rule.delta(eps, settings.delta_fixed)
        micro_grid(config, eps, delta)
        level_points(profile.sample(reference_grid), eps, delta)

    rows = _map(
        config.workers,
        lambda eps: _convergence_row(config, p, layer, profile, reference, eps),
        list(settings.epsilons),
    )
    report = ConvergenceReport("converge", rows)
    gates = _gates_from(macro.report, "converge", "macro/")
    _strict_decrease(gates, "error-decreasing", report.errors)
    micro_ok = all(row.extras["micro_passed"] == 1.0 for row in rows)
    gates.add("micro-invariants", float(micro_ok), 1.0, passed=micro_ok)
    return StudyResult(
        name=StudyName.CONVERGE.value,
        table=report.to_frame(),
        gates=gates,
        fields={"reference": reference},
        summary={"macro_dt": macro.dt, "macro_steps": macro.steps},
    )


def _level_velocities(run: MacroRun, epsilon: float, half_step: float) -> tuple[ParticleSystem, np.ndarray]:
    before, during, after = run.snapshots
    ps = level_points(during.u, epsilon, epsilon)
    tracked = []
    for state in (before, after):
        other = level_points(state.u, epsilon, epsilon)
        if other.m_index != ps.m_index or other.count != ps.count:
            msg = f"Level set changed between snapshots: M={other.m_index}/{ps.m_index}, count={other.count}/{ps.count}"
            raise RuntimeError(msg)
        tracked.append(other.positions)
    return ps, (tracked[1] - tracked[0]) / (2.0 * half_step)


def run_orowan_check(config: SimulationConfig, layer: LayerProfile) -> StudyResult:
    """Level-point velocities of the macro solution against -c₀ I₁[ū] at the level points.

    A second run with c₀ scaled by ``c0_factor`` is measured at correspondingly scaled times;
    its velocities must scale by the same factor.

    Used in:
    - tool.py
    """
    settings = config.orowan
    c0 = config.macro.c0 or layer.c0
    times = [settings.probe_time - settings.half_step, settings.probe_time, settings.probe_time + settings.half_step]
    run = _macro(config, c0, settings.T, times)
    ps, measured = _level_velocities(run, settings.epsilon, settings.half_step)
    stress = i1_apply(run.snapshots[1].u, OperatorBackend.PV)
    predicted = -c0 * np.asarray(stress.evaluate(ps.positions))

    factor = settings.c0_factor
    scaled_times = [t / factor for t in times]
    scaled_run = _macro(config, c0 * factor, settings.T / factor, scaled_times)
    _, scaled = _level_velocities(scaled_run, settings.epsilon, settings.half_step / factor)

    compared = np.abs(predicted) >= settings.min_velocity
    deviation = np.full(ps.count, math.nan)
    deviation[compared] = np.abs(measured[compared] - predicted[compared]) / np.abs(predicted[compared])
    scaling = np.full(ps.count, math.nan)
    moving = np.abs(measured) >= settings.min_velocity
    scaling[moving] = scaled[moving] / (factor * measured[moving])

    gates = _gates_from(run.report, "orowan", "macro/")
    median = float(np.median(deviation[compared])) if np.any(compared) else 0.0
    gates.add("velocity", median, settings.tolerance, passed=median <= settings.tolerance, note="median deviation")
    scale_error = float(np.median(np.abs(scaling[moving] - 1.0))) if np.any(moving) else 0.0
    gates.add("c0-scaling", scale_error, settings.scaling_tolerance, passed=scale_error <= settings.scaling_tolerance)
    table = pd.DataFrame(
        {
            "level": ps.epsilon * np.arange(ps.m_index, ps.n_index + 1),
            "x": ps.positions,
            "velocity": measured,
            "predicted": predicted,
            "relative_deviation": deviation,
            "scaled_velocity": scaled,
            "scaling_ratio": scaling,
        }
    )
    table["dt"] = run.dt
    table["cfl_bound"] = run.cfl_bound
    return StudyResult(
        name=StudyName.OROWAN.value,
        table=table,
        gates=gates,
        summary={"c0": c0, "compared": int(np.count_nonzero(compared)), "median_deviation": median},
    )

