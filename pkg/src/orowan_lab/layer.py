#!/usr/bin/env python3
# this_file: src/orowan_lab/layer.py

"""Transition layer φ, corrector ψ and the mobility constant c₀."""

from __future__ import annotations

import math

import numpy as np
from loguru import logger

from .models import CorrectorProfile, Grid1D, LayerProfile, ScalarField, ValidationReport
from .nonlocal_ops import i1_apply
from .numerics import central_derivative, trapezoid_integral
from .potential import PotentialSpec, validate_potential

# Nodes held at the far-field asymptote on each side
PINNED_NODES = 8
# Pseudo-time step as a fraction of h/π
DEFAULT_RELAXATION = 0.5
DEFAULT_TOLERANCE = 1e-6
DEFAULT_MAX_SWEEPS = 100_000
# Crossings closer than this to the origin are left alone
RECENTRE_TOLERANCE = 1e-13
CENTRING_TOLERANCE = 1e-8
PROGRESS_EVERY = 2000
# Corrector tails are fitted on |x| >= TAIL_FIT_RADIUS
TAIL_FIT_RADIUS = 1.0
ENVELOPE_TOLERANCE = 1e-12


def nabarro_closed_form(d: float, x: float | np.ndarray) -> float | np.ndarray:
    """1/2 + arctan(x/d)/π, the exact layer of the classical potential with lattice spacing d."""
    if not d > 0:
        msg = f"Lattice spacing d must be positive, got {d}"
        raise ValueError(msg)
    value = 0.5 + np.arctan(np.asarray(x, dtype=float) / d) / math.pi
    return float(value) if np.ndim(x) == 0 else value


def _layer_field(grid: Grid1D, values: np.ndarray) -> ScalarField:
    return ScalarField(grid=grid, values=values, left_limit=0.0, right_limit=1.0, tail_power=1.0)


def _mobility(derivative: ScalarField) -> float:
    squared = ScalarField(
        grid=derivative.grid,
        values=derivative.values**2,
        left_limit=0.0,
        right_limit=0.0,
        tail_power=2.0 * derivative.tail_power if derivative.tail_power else None,
    )
    return 1.0 / trapezoid_integral(squared)


def _tail_constant(field: ScalarField, derivative: ScalarField, alpha: float) -> float:
    x = field.nodes
    far = np.abs(x) >= 1.0
    asymptote = np.heaviside(x[far], 0.5) - 1.0 / (alpha * math.pi * x[far])
    tail = float(np.max(x[far] ** 2 * np.abs(field.values[far] - asymptote))) if np.any(far) else 0.0
    envelope = float(np.max((1.0 + x**2) * derivative.values))
    return max(tail, envelope)


def _assemble(values: np.ndarray, grid: Grid1D, alpha: float, residual: float, sweeps: int) -> LayerProfile:
    field = _layer_field(grid, values)
    derivative = central_derivative(field)
    return LayerProfile(
        field=field,
        derivative=derivative,
        alpha=alpha,
        c0=_mobility(derivative),
        tail_constant_k1=_tail_constant(field, derivative, alpha),
        residual=residual,
        sweeps=sweeps,
    )


def layer_from_closed_form(d: float, grid: Grid1D) -> LayerProfile:
    """Classical layer sampled from the closed form, without iteration."""
    values = np.asarray(nabarro_closed_form(d, grid.nodes))
    return _assemble(values, grid, 1.0 / d, residual=0.0, sweeps=0)


def _pinned_mask(grid: Grid1D) -> np.ndarray:
    pinned = np.zeros(grid.n, dtype=bool)
    pinned[:PINNED_NODES] = True
    pinned[-PINNED_NODES:] = True
    return pinned


def _recentre(values: np.ndarray, grid: Grid1D, free: np.ndarray) -> np.ndarray:
    x = grid.nodes
    crossing = float(np.interp(0.5, values, x))
    if abs(crossing) <= RECENTRE_TOLERANCE:
        return values
    shifted = values.copy()
    shifted[free] = np.interp(x[free] + crossing, x, values)
    return shifted


def solve_layer_profile(
    p: PotentialSpec,
    grid: Grid1D,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    relaxation: float = DEFAULT_RELAXATION,
) -> LayerProfile:
    """Relax φ ← φ + τ(I₁[φ] - W'(φ)) from the closed form with d = 1/α.

    The outer nodes are pinned to H(x) - 1/(απx) and the 1/2 crossing is moved
    back to the origin after every sweep.

    Raises:
        ValueError: potential fails validation or the grid misses the origin
        RuntimeError: residual above ``tolerance`` after ``max_sweeps``

    Used in:
    - studies.py
    - tool.py
    """
    report = validate_potential(p)
    if not report.passed:
        msg = f"Potential rejected: {', '.join(report.failures)}"
        raise ValueError(msg)
    if not grid.left < 0 < grid.right:
        msg = f"Layer grid [{grid.left}, {grid.right}] must contain the origin"
        raise ValueError(msg)

    alpha = p.alpha
    x = grid.nodes
    values = np.asarray(nabarro_closed_form(1.0 / alpha, x)).copy()
    pinned = _pinned_mask(grid)
    free = ~pinned
    values[pinned] = np.heaviside(x[pinned], 0.5) - 1.0 / (alpha * math.pi * x[pinned])
    tau = relaxation * grid.h / math.pi

    residual = math.inf
    for sweep in range(max_sweeps + 1):
        update = i1_apply(_layer_field(grid, values)).values - p.first_derivative(values)
        residual = float(np.max(np.abs(update[free])))
        if residual < tolerance:
            logger.debug(f"Layer converged after {sweep} sweeps, residual {residual:.3e}")
            return _assemble(values, grid, alpha, residual, sweep)
        if sweep % PROGRESS_EVERY == 0:
            logger.debug(f"Layer sweep {sweep}: residual {residual:.3e}")
        values[free] += tau * update[free]
        values = _recentre(values, grid, free)

    msg = f"Layer solver did not converge: residual {residual:.3e} after {max_sweeps} sweeps"
    raise RuntimeError(msg)


def compute_c0(layer: LayerProfile) -> float:
    """c₀ = 1/∫(φ')², the squared derivative carrying a |x|^-4 tail."""
    return _mobility(layer.derivative)


def solve_corrector(
    p: PotentialSpec,
    layer: LayerProfile,
    stress_l: float,
    *,
    tolerance: float = DEFAULT_TOLERANCE,
    max_sweeps: int = DEFAULT_MAX_SWEEPS,
    relaxation: float = DEFAULT_RELAXATION,
) -> CorrectorProfile:
    """Solve I₁[ψ] = W''(φ)ψ + (L/α)(W''(φ) - α) + c₀Lφ' in the complement of φ'.

    Richardson iteration from ψ = 0 with the outer nodes held at zero. Both the
    iterate and the residual are projected orthogonally to φ' on the free nodes,
    which removes the kernel of the linearised operator. The residual tolerance
    applies per unit stress once |L| > 1, so ψ is exactly linear in L.

    Used in:
    - studies.py
    """
    grid = layer.field.grid
    phi = layer.field.values
    w2 = p.second_derivative(phi)
    alpha, c0 = layer.alpha, layer.c0
    rhs = (stress_l / alpha) * (w2 - alpha) + c0 * stress_l * layer.derivative.values

    free = ~_pinned_mask(grid)
    direction = np.where(free, layer.derivative.values, 0.0)
    direction /= np.linalg.norm(direction)

    def project(v: np.ndarray) -> np.ndarray:
        v = np.where(free, v, 0.0)
        return v - (v @ direction) * direction

    psi = np.zeros(grid.n)
    scale = max(abs(stress_l), 1.0)
    tau = relaxation * grid.h / math.pi
    residual = math.inf
    raw = np.zeros(grid.n)
    for sweep in range(max_sweeps + 1):
        field = ScalarField(grid=grid, values=psi, left_limit=0.0, right_limit=0.0, tail_power=1.0)
        raw = i1_apply(field).values - w2 * psi - rhs
        projected = project(raw)
        residual = float(np.max(np.abs(projected)))
        if residual < tolerance * scale:
            break
        if sweep % PROGRESS_EVERY == 0:
            logger.debug(f"Corrector sweep {sweep}: residual {residual:.3e}")
        psi = psi + tau * projected
    else:
        msg = f"Corrector solver did not converge: residual {residual:.3e} after {max_sweeps} sweeps"
        raise RuntimeError(msg)

    defect = float(np.where(free, raw, 0.0) @ direction)
    field = ScalarField(grid=grid, values=psi, left_limit=0.0, right_limit=0.0, tail_power=1.0)
    k2, k3 = _fit_corrector_tails(field)
    return CorrectorProfile(
        field=field,
        stress_l=float(stress_l),
        k2=k2,
        k3=k3,
        residual=residual,
        sweeps=sweep,
        solvability_defect=defect,
    )


def _fit_corrector_tails(field: ScalarField) -> tuple[float, float]:
    """Least-squares K₂ of ψ ≈ K₂/x on |x| ≥ 1 and the smallest K₃ of the envelope K₃/(1+x²)."""
    x = field.nodes
    interior = ~_pinned_mask(field.grid)
    far = interior & (np.abs(x) >= TAIL_FIT_RADIUS)
    near = interior & ~far
    k2 = 0.0
    k3 = 0.0
    if np.any(far):
        basis = 1.0 / x[far]
        k2 = float(basis @ field.values[far] / (basis @ basis))
        k3 = float(np.max((1.0 + x[far] ** 2) * np.abs(field.values[far] - k2 * basis)))
    if np.any(near):
        k3 = max(k3, float(np.max((1.0 + x[near] ** 2) * np.abs(field.values[near]))))
    return k2, k3


def verify_layer_tails(layer: LayerProfile) -> ValidationReport:
    """Report the tail constants K₀, K₁ and the asymptote residual of a layer.

    A flat field fails the ``is-layer`` row instead of raising.
    """
    report = ValidationReport("layer-tails")
    field, derivative = layer.field, layer.derivative
    spread = float(np.ptp(field.values))
    report.add("is-layer", spread, 0.5, passed=spread > 0.5, note="range of φ over the grid")
    if spread <= 0.5:
        return report

    x = field.nodes
    interior = ~_pinned_mask(field.grid)
    envelope = (1.0 + x[interior] ** 2) * derivative.values[interior]
    k0 = float(np.min(envelope))
    k1 = float(np.max(envelope))
    report.add("K0", k0, 0.0, passed=k0 > 0, note="min (1+x²)φ'")
    report.add("K1", k1, math.inf, passed=math.isfinite(k1), note="max (1+x²)φ'")

    far = interior & (np.abs(x) >= 1.0)
    asymptote = np.heaviside(x[far], 0.5) - 1.0 / (layer.alpha * math.pi * x[far])
    tail = float(np.max(x[far] ** 2 * np.abs(field.values[far] - asymptote)))
    report.add("tail-residual", tail, math.inf, passed=math.isfinite(tail), note="sup x²|φ - H + 1/(απx)|")

    min_step = float(np.min(np.diff(field.values)))
    report.add("monotone", min_step, 0.0, passed=min_step > 0)
    centre = abs(float(field.evaluate(0.0)) - 0.5) if field.grid.left < 0 < field.grid.right else math.inf
    report.add("centred", centre, CENTRING_TOLERANCE, passed=centre <= CENTRING_TOLERANCE)
    return report


def verify_corrector_tails(corrector: CorrectorProfile, tolerance: float = DEFAULT_TOLERANCE) -> ValidationReport:
    """Report the fitted constants of |ψ - K₂/x| ≤ K₃/(1+x²) and |ψ'| ≤ K₃'/(1+x²)."""
    report = ValidationReport("corrector-tails")
    field = corrector.field
    x = field.nodes
    derivative = central_derivative(field).values
    interior = ~_pinned_mask(field.grid)
    k3_prime = float(np.max((1.0 + x[interior] ** 2) * np.abs(derivative[interior])))
    report.add("K2", corrector.k2, math.inf, passed=math.isfinite(corrector.k2))
    report.add("K3", corrector.k3, math.inf, passed=math.isfinite(corrector.k3))
    report.add("K3-derivative", k3_prime, math.inf, passed=math.isfinite(k3_prime))
    xs = x[interior]
    far = np.abs(xs) >= TAIL_FIT_RADIUS
    tail_term = np.where(far, np.abs(corrector.k2) / np.maximum(np.abs(xs), TAIL_FIT_RADIUS), 0.0)
    excess = float(np.max(np.abs(field.values[interior]) - corrector.k3 / (1.0 + xs**2) - tail_term))
    report.add("decay-envelope", excess, ENVELOPE_TOLERANCE, passed=excess <= ENVELOPE_TOLERANCE)
    threshold = tolerance * max(abs(corrector.stress_l), 1.0)
    report.add("residual", corrector.residual, threshold, passed=corrector.residual < threshold)
    return report
