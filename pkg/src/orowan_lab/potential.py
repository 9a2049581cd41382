#!/usr/bin/env python3
# this_file: src/orowan_lab/potential.py

"""Periodic multi-well potentials W given as finite cosine series."""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from loguru import logger

from .models import PotentialConfig, PotentialKind, ValidationReport

TWO_PI = 2.0 * math.pi
# Sampling of one period for validation and sup-norms
DEFAULT_VALIDATION_SAMPLES = 1024
MIN_VALIDATION_SAMPLES = 16
PERIODICITY_TOLERANCE = 1e-12
# Central-difference checks of the analytic derivatives
FD_STEP = 1e-3
FD_RATIO_BOUNDS = (3.5, 4.5)
ALPHA_FD_STEP = 1e-3
ALPHA_TOLERANCE = 1e-6


@dataclass(frozen=True)
class PotentialSpec:
    """W(u) = Σ_k a_k (1 - cos 2πku), k = 1..K.

    Every such W has period 1 and vanishes on the integers. The classical
    Peierls-Nabarro potential is the single-term series a_1 = 1/(4π²d).

    Used in:
    - layer.py
    - solvers.py
    - studies.py
    """

    kind: PotentialKind
    coefficients: tuple[float, ...]
    d: float | None = None
    alpha: float = field(init=False)

    def __post_init__(self) -> None:
        if not self.coefficients:
            msg = "A potential needs at least one cosine coefficient"
            raise ValueError(msg)
        object.__setattr__(self, "coefficients", tuple(float(a) for a in self.coefficients))
        object.__setattr__(self, "alpha", float(self.second_derivative(0.0)))

    @property
    def _modes(self) -> np.ndarray:
        return TWO_PI * np.arange(1, len(self.coefficients) + 1)

    def _series(self, u: float | np.ndarray, weights: np.ndarray, trig: Any) -> float | np.ndarray:
        u_arr = np.asarray(u, dtype=float)
        phases = np.multiply.outer(u_arr, self._modes)
        result = trig(phases) @ weights
        return float(result) if np.ndim(u) == 0 else result

    def value(self, u: float | np.ndarray) -> float | np.ndarray:
        a = np.asarray(self.coefficients)
        return self._series(u, a, lambda ph: 1.0 - np.cos(ph))

    def first_derivative(self, u: float | np.ndarray) -> float | np.ndarray:
        a = np.asarray(self.coefficients)
        return self._series(u, a * self._modes, np.sin)

    def second_derivative(self, u: float | np.ndarray) -> float | np.ndarray:
        a = np.asarray(self.coefficients)
        return self._series(u, a * self._modes**2, np.cos)

    def max_abs(self, order: int, n_samples: int = DEFAULT_VALIDATION_SAMPLES) -> float:
        """sup over one period of |W|, |W'| or |W''| (order 0, 1, 2)."""
        u = np.arange(n_samples) / n_samples
        return float(np.max(np.abs(eval_potential(self, u, order))))


def make_classical_potential(d: float) -> PotentialSpec:
    """Classical potential (1/(4π²d))(1 - cos 2πu); W''(0) = 1/d.

    Used in:
    - tests
    - potential_from_config
    """
    if not d > 0:
        msg = f"Lattice spacing d must be positive, got {d}"
        raise ValueError(msg)
    return PotentialSpec(PotentialKind.CLASSICAL, (1.0 / (4.0 * math.pi**2 * d),), d=float(d))


def make_cosine_potential(coeffs: list[float] | tuple[float, ...]) -> PotentialSpec:
    """Cosine series Σ a_k (1 - cos 2πku). Admissibility is checked by validate_potential."""
    return PotentialSpec(PotentialKind.COSINE, tuple(coeffs))


def potential_from_config(config: PotentialConfig | Mapping[str, Any]) -> PotentialSpec:
    """Build a potential from ``{"kind": "classical", "d": ..}`` or ``{"kind": "cosine", "coeffs": [..]}``."""
    if not isinstance(config, PotentialConfig):
        config = PotentialConfig.model_validate(dict(config))
    if config.kind is PotentialKind.CLASSICAL:
        return make_classical_potential(config.d)
    return make_cosine_potential(config.coeffs)


def eval_potential(p: PotentialSpec, u: float | np.ndarray, order: int) -> float | np.ndarray:
    """W(u), W'(u) or W''(u)."""
    if order == 0:
        return p.value(u)
    if order == 1:
        return p.first_derivative(u)
    if order == 2:  # noqa: PLR2004
        return p.second_derivative(u)
    msg = f"Derivative order must be 0, 1 or 2, got {order}"
    raise ValueError(msg)


def _fd_error(exact: Any, primitive: Any, u: np.ndarray, h: float) -> float:
    approx = (primitive(u + h) - primitive(u - h)) / (2.0 * h)
    return float(np.max(np.abs(approx - exact(u))))


def _fd_ratio(exact: Any, primitive: Any, u: np.ndarray) -> float:
    """Error ratio of central differences under h -> h/2; 4 for a consistent derivative."""
    coarse = _fd_error(exact, primitive, u, FD_STEP)
    fine = _fd_error(exact, primitive, u, FD_STEP / 2.0)
    return coarse / fine if fine > 0 else math.inf


def fd_curvature_at_zero(p: PotentialSpec, h: float = ALPHA_FD_STEP) -> float:
    """Richardson-extrapolated second difference of W at 0."""

    def second_difference(step: float) -> float:
        return float((p.value(step) - 2.0 * p.value(0.0) + p.value(-step)) / step**2)

    return (4.0 * second_difference(h / 2.0) - second_difference(h)) / 3.0


def validate_potential(p: PotentialSpec, n_samples: int = DEFAULT_VALIDATION_SAMPLES) -> ValidationReport:
    """Check periodicity, integer minima, positivity and non-degeneracy on one sampled period.

    The analytic W' and W'' are checked against central differences by their
    error ratio under step halving, which does not depend on the amplitude of W.
    Violations produce failed rows, never exceptions.

    Used in:
    - layer.py
    - studies.py
    """
    if n_samples < MIN_VALIDATION_SAMPLES:
        msg = f"Need at least {MIN_VALIDATION_SAMPLES} validation samples, got {n_samples}"
        raise ValueError(msg)
    report = ValidationReport("potential")
    u = np.arange(n_samples) / n_samples
    w = p.value(u)

    drift = float(np.max(np.abs(p.value(u + 1.0) - w)))
    report.add("period-1", drift, PERIODICITY_TOLERANCE, passed=drift <= PERIODICITY_TOLERANCE)

    integers = np.arange(-2.0, 3.0)
    at_integers = float(np.max(np.abs(p.value(integers))))
    report.add("zero-on-integers", at_integers, PERIODICITY_TOLERANCE, passed=at_integers <= PERIODICITY_TOLERANCE)

    interior_min = float(np.min(w[1:]))
    report.add("positive-inside", interior_min, 0.0, passed=interior_min > 0)

    report.add("nondegenerate", p.alpha, 0.0, passed=p.alpha > 0)

    lo, hi = FD_RATIO_BOUNDS
    note = f"error ratio under h -> h/2 in [{lo}, {hi}]"
    ratio = _fd_ratio(p.first_derivative, p.value, u)
    report.add("first-derivative", ratio, 4.0, passed=lo <= ratio <= hi, note=note)
    ratio = _fd_ratio(p.second_derivative, p.first_derivative, u)
    report.add("second-derivative", ratio, 4.0, passed=lo <= ratio <= hi, note=note)

    curvature = fd_curvature_at_zero(p)
    alpha_err = abs(curvature - p.alpha) / abs(p.alpha) if p.alpha != 0 else math.inf
    report.add("alpha", alpha_err, ALPHA_TOLERANCE, passed=alpha_err <= ALPHA_TOLERANCE, note="relative to FD W''(0)")

    if not report.passed:
        logger.warning(f"Potential {p.kind.value} fails: {', '.join(report.failures)}")
    return report
