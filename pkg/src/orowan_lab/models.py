#!/usr/bin/env python3
# this_file: src/orowan_lab/models.py

"""Data models, enums and configuration schema for orowan-lab."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from functools import cached_property
from typing import Any

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy.interpolate import CubicSpline, PchipInterpolator

# Validation constants
MIN_GRID_NODES = 8
MONOTONE_TOLERANCE = 1e-12


class PotentialKind(str, Enum):
    """Families of periodic multi-well potentials.

    Used in:
    - potential.py
    - models.py
    """

    CLASSICAL = "classical"
    COSINE = "cosine"


class OperatorBackend(str, Enum):
    """Evaluation paths for the half-Laplacian and the Hilbert transform.

    Used in:
    - nonlocal_ops.py
    - solvers.py
    - studies.py
    """

    PV = "pv-quadrature"
    SPECTRAL = "spectral"

    @classmethod
    def parse(cls, value: str | OperatorBackend) -> OperatorBackend:
        """Accept the short aliases used in config files."""
        if isinstance(value, OperatorBackend):
            return value
        aliases = {"pv": cls.PV, "pv-quadrature": cls.PV, "quadrature": cls.PV, "spectral": cls.SPECTRAL}
        key = value.strip().lower()
        if key not in aliases:
            msg = f"Unsupported operator backend: {value}"
            raise ValueError(msg)
        return aliases[key]


class DeltaRule(str, Enum):
    """Coupling between the layer width δ and the level spacing ε.

    Used in:
    - studies.py
    """

    EPSILON = "epsilon"
    SQRT = "sqrt"
    FIXED = "fixed"

    def delta(self, epsilon: float, fixed: float = 0.1) -> float:
        """Return δ for the given ε."""
        if self is DeltaRule.EPSILON:
            return epsilon
        if self is DeltaRule.SQRT:
            return math.sqrt(epsilon)
        return fixed


class InitialKind(str, Enum):
    """Shapes of the initial plastic-slip profile u₀.

    Used in:
    - studies.py
    """

    LOGISTIC = "logistic"
    ARCTAN = "arctan"
    CSV = "csv"


class StudyName(str, Enum):
    """Subcommands of the experiment harness.

    Used in:
    - api.py
    - cli.py
    - tool.py
    """

    LAYER = "layer"
    C0 = "c0"
    MICRO = "micro"
    MACRO = "macro"
    DDD = "ddd"
    APPROX = "approx"
    RECONSTRUCT = "reconstruct"
    CONVERGE = "converge"
    OROWAN = "orowan"


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid of ``n`` nodes covering ``[center - half_width, center + half_width]``.

    Used in:
    - every numerical module
    """

    center: float
    half_width: float
    n: int

    def __post_init__(self) -> None:
        if self.n < MIN_GRID_NODES:
            msg = f"Grid needs at least {MIN_GRID_NODES} nodes, got {self.n}"
            raise ValueError(msg)
        if not self.half_width > 0 or not math.isfinite(self.half_width):
            msg = f"Grid half_width must be positive and finite, got {self.half_width}"
            raise ValueError(msg)

    @property
    def h(self) -> float:
        """Node spacing."""
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def left(self) -> float:
        return self.center - self.half_width

    @property
    def right(self) -> float:
        return self.center + self.half_width

    @cached_property
    def nodes(self) -> np.ndarray:
        """Node coordinates (read-only)."""
        x = np.linspace(self.left, self.right, self.n)
        x.flags.writeable = False
        return x

    def window_mask(self, window: tuple[float, float] | None) -> np.ndarray:
        """Boolean mask of the nodes inside a closed window (all nodes when ``None``)."""
        if window is None:
            return np.ones(self.n, dtype=bool)
        lo, hi = window
        return (self.nodes >= lo) & (self.nodes <= hi)

    def refine(self, factor: int) -> Grid1D:
        """Same interval with ``factor`` times as many nodes."""
        return Grid1D(self.center, self.half_width, self.n * factor)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A sampled function with constant far-field limits and an optional algebraic tail.

    Beyond the grid the field is modelled as ``limit + (edge - limit) * (r_edge / r)**tail_power``
    where ``r`` is the distance to the grid centre. Without ``tail_power`` the field is taken as
    equal to its limit outside the grid.

    Used in:
    - every numerical module
    """

    grid: Grid1D
    values: np.ndarray
    left_limit: float
    right_limit: float
    tail_power: float | None = None
    monotone: bool = False

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n,):
            msg = f"Field has {values.shape} samples, grid has {self.grid.n} nodes"
            raise ValueError(msg)
        if not np.all(np.isfinite(values)):
            msg = "Field values must be finite"
            raise ValueError(msg)
        if not (math.isfinite(self.left_limit) and math.isfinite(self.right_limit)):
            msg = f"Far-field limits must be finite, got ({self.left_limit}, {self.right_limit})"
            raise ValueError(msg)
        if self.tail_power is not None and self.tail_power <= 0:
            msg = f"tail_power must be positive, got {self.tail_power}"
            raise ValueError(msg)
        if self.monotone and not is_nondecreasing(values):
            msg = "Field declared monotone but values decrease"
            raise ValueError(msg)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    @property
    def edge_amplitudes(self) -> tuple[float, float]:
        """Offsets of the edge samples from the far-field limits (left, right)."""
        return float(self.values[0] - self.left_limit), float(self.values[-1] - self.right_limit)

    @cached_property
    def _interpolant(self) -> CubicSpline | PchipInterpolator:
        if self.monotone:
            return PchipInterpolator(self.grid.nodes, self.values, extrapolate=False)
        return CubicSpline(self.grid.nodes, self.values, extrapolate=False)

    def evaluate(self, x: float | np.ndarray) -> float | np.ndarray:
        """Evaluate the field anywhere on the real line.

        Cubic interpolation inside the grid, the declared tail model outside it.

        Used in:
        - numerics.py
        - nonlocal_ops.py
        - particles.py
        """
        xs = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty_like(xs)
        grid = self.grid
        inside = (xs >= grid.left) & (xs <= grid.right)
        out[inside] = self._interpolant(xs[inside])
        left_amp, right_amp = self.edge_amplitudes
        below = xs < grid.left
        above = xs > grid.right
        if self.tail_power is None:
            out[below] = self.left_limit
            out[above] = self.right_limit
        else:
            c, p = grid.center, self.tail_power
            out[below] = self.left_limit + left_amp * ((c - grid.left) / (c - xs[below])) ** p
            out[above] = self.right_limit + right_amp * ((grid.right - c) / (xs[above] - c)) ** p
        if np.ndim(x) == 0:
            return float(out[0])
        return out

    def with_values(self, values: np.ndarray, **changes: Any) -> ScalarField:
        """Copy of this field with new samples and optionally other metadata."""
        return replace(self, values=values, **changes)


def is_nondecreasing(values: np.ndarray, tolerance: float = MONOTONE_TOLERANCE) -> bool:
    """True when successive samples never drop by more than ``tolerance``."""
    return bool(np.all(np.diff(values) >= -tolerance))


@dataclass
class ReportRow:
    """One acceptance check: measured value against a threshold."""

    label: str
    value: float
    threshold: float
    passed: bool
    note: str = ""


@dataclass
class ValidationReport:
    """Ordered list of acceptance checks.

    Used in:
    - potential.py
    - layer.py
    - particles.py
    - solvers.py
    - studies.py
    """

    title: str
    rows: list[ReportRow] = field(default_factory=list)

    def add(self, label: str, value: float, threshold: float, *, passed: bool, note: str = "") -> ReportRow:
        row = ReportRow(label=label, value=float(value), threshold=float(threshold), passed=bool(passed), note=note)
        self.rows.append(row)
        return row

    def extend(self, other: ValidationReport, prefix: str = "") -> None:
        """Append the rows of another report, optionally prefixing labels."""
        for row in other.rows:
            self.rows.append(replace(row, label=f"{prefix}{row.label}"))

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    @property
    def failures(self) -> list[str]:
        return [row.label for row in self.rows if not row.passed]

    def row(self, label: str) -> ReportRow:
        for row in self.rows:
            if row.label == label:
                return row
        msg = f"No report row labelled {label!r}"
        raise KeyError(msg)

    def to_frame(self) -> pd.DataFrame:
        if not self.rows:
            msg = f"Report {self.title!r} has no rows"
            raise ValueError(msg)
        return pd.DataFrame([vars(row) for row in self.rows], columns=["label", "value", "threshold", "passed", "note"])


@dataclass
class ConvergenceRow:
    """One configuration of a refinement study."""

    epsilon: float
    delta: float
    error: float
    wall_time: float = 0.0
    dt: float = math.nan
    cfl_bound: float = math.nan
    extras: dict[str, float] = field(default_factory=dict)


@dataclass
class ConvergenceReport:
    """Rows of a refinement study, in the order they were configured.

    Used in:
    - studies.py
    - reporting.py
    """

    title: str
    rows: list[ConvergenceRow] = field(default_factory=list)

    @property
    def errors(self) -> np.ndarray:
        return np.array([row.error for row in self.rows])

    def strictly_decreasing(self, column: str = "error") -> bool:
        values = self.to_frame()[column].to_numpy()
        return bool(np.all(np.diff(values) < 0))

    def to_frame(self) -> pd.DataFrame:
        if not self.rows:
            msg = f"Report {self.title!r} has no rows"
            raise ValueError(msg)
        records = []
        for row in self.rows:
            record = {
                "epsilon": row.epsilon,
                "delta": row.delta,
                "error": row.error,
                "dt": row.dt,
                "cfl_bound": row.cfl_bound,
                "wall_time": row.wall_time,
            }
            record.update(row.extras)
            records.append(record)
        return pd.DataFrame.from_records(records)


@dataclass(frozen=True, eq=False)
class ParticleSystem:
    """Level points ``x_i`` of a monotone profile together with the (ε, δ, M_ε) bookkeeping.

    Used in:
    - particles.py
    - nonlocal_ops.py
    - solvers.py
    - studies.py
    """

    epsilon: float
    delta: float
    positions: np.ndarray
    m_index: int

    def __post_init__(self) -> None:
        if self.epsilon <= 0 or self.delta <= 0:
            msg = f"epsilon and delta must be positive, got ({self.epsilon}, {self.delta})"
            raise ValueError(msg)
        positions = np.array(self.positions, dtype=float)
        if positions.ndim != 1 or positions.size == 0:
            msg = "Empty particle system"
            raise ValueError(msg)
        if np.any(np.diff(positions) <= 0):
            msg = "Particle positions must be strictly increasing"
            raise ValueError(msg)
        positions.flags.writeable = False
        object.__setattr__(self, "positions", positions)

    @property
    def count(self) -> int:
        return int(self.positions.size)

    @property
    def n_index(self) -> int:
        """Index N_ε of the topmost level."""
        return self.m_index + self.count - 1

    @property
    def base_level(self) -> float:
        """ε·M_ε, the value left of every layer."""
        return self.epsilon * self.m_index

    @property
    def top_level(self) -> float:
        """ε·N_ε."""
        return self.epsilon * self.n_index

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.positions)


@dataclass(frozen=True, eq=False)
class LayerProfile:
    """Transition layer φ with its derivative, tail constant and mobility c₀.

    Used in:
    - layer.py
    - particles.py
    - solvers.py
    - studies.py
    """

    field: ScalarField
    derivative: ScalarField
    alpha: float
    c0: float
    tail_constant_k1: float
    residual: float = 0.0
    sweeps: int = 0

    def asymptote(self, z: np.ndarray) -> np.ndarray:
        """Far-field form H(z) - 1/(α π z) of the layer."""
        z = np.asarray(z, dtype=float)
        return np.heaviside(z, 0.5) - 1.0 / (self.alpha * math.pi * z)

    @cached_property
    def _interpolant(self) -> PchipInterpolator:
        return PchipInterpolator(self.field.nodes, self.field.values, extrapolate=False)

    def evaluate(self, z: float | np.ndarray) -> float | np.ndarray:
        """Evaluate φ anywhere: cubic interpolation on the layer grid, the asymptote beyond it.

        The edge mismatch between the samples and the asymptote is carried outside with a
        cubic decay so that the evaluation stays continuous and non-decreasing.
        """
        zs = np.atleast_1d(np.asarray(z, dtype=float))
        grid = self.field.grid
        inside = (zs >= grid.left) & (zs <= grid.right)
        out = np.empty_like(zs)
        out[inside] = self._interpolant(zs[inside])
        for edge, value, mask in (
            (grid.left, self.field.values[0], zs < grid.left),
            (grid.right, self.field.values[-1], zs > grid.right),
        ):
            if np.any(mask):
                mismatch = value - float(self.asymptote(np.array([edge]))[0])
                far = zs[mask]
                out[mask] = np.clip(self.asymptote(far) + mismatch * (edge / far) ** 3, 0.0, 1.0)
        if np.ndim(z) == 0:
            return float(out[0])
        return out


@dataclass(frozen=True, eq=False)
class CorrectorProfile:
    """Corrector ψ of the linearised layer equation under an applied stress.

    Used in:
    - layer.py
    - studies.py
    """

    field: ScalarField
    stress_l: float
    k2: float
    k3: float
    residual: float
    sweeps: int
    solvability_defect: float = 0.0


@dataclass(frozen=True, eq=False)
class MicroState:
    """Solution of the rescaled Peierls-Nabarro equation at time ``t``."""

    u: ScalarField
    epsilon: float
    delta: float
    t: float = 0.0


@dataclass(frozen=True, eq=False)
class MacroState:
    """Solution of the macroscopic equation: plastic slip ``u`` and its density ``f``."""

    u: ScalarField
    f: ScalarField
    c0: float
    t: float = 0.0

    @property
    def mass(self) -> float:
        return float(np.sum(self.f.values) * self.f.grid.h)


@dataclass
class MicroRun:
    """Result of a microscopic run."""

    final: MicroState
    snapshots: list[MicroState]
    steps: int
    dt: float
    cfl_bound: float
    report: ValidationReport


@dataclass
class MacroRun:
    """Result of a macroscopic run."""

    final: MacroState
    snapshots: list[MacroState]
    steps: int
    dt: float
    cfl_bound: float
    report: ValidationReport


@dataclass
class Trajectory:
    """Positions of N dislocations sampled at increasing times."""

    times: np.ndarray
    positions: np.ndarray

    def at(self, index: int) -> np.ndarray:
        return self.positions[index]

    def to_frame(self) -> pd.DataFrame:
        columns = {"t": self.times}
        for i in range(self.positions.shape[1]):
            columns[f"y_{i + 1}"] = self.positions[:, i]
        return pd.DataFrame(columns)


@dataclass
class StudyResult:
    """Outcome of one harness study: main table, gates and auxiliary outputs.

    Used in:
    - studies.py
    - tool.py
    """

    name: str
    table: pd.DataFrame
    gates: ValidationReport
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    fields: dict[str, ScalarField] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.gates.passed


# Configuration sections


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class PotentialConfig(_Section):
    kind: PotentialKind = Field(default=PotentialKind.CLASSICAL, description="classical or cosine")
    d: float = Field(default=1.0, gt=0, description="Lattice spacing of the classical potential")
    coeffs: list[float] = Field(default_factory=list, description="Cosine-series coefficients a_k")

    @model_validator(mode="after")
    def _coefficients_for_cosine(self) -> PotentialConfig:
        if self.kind is PotentialKind.COSINE and not self.coeffs:
            msg = "A cosine potential needs at least one coefficient"
            raise ValueError(msg)
        return self


class GridConfig(_Section):
    center: float = Field(default=0.0, description="Grid centre")
    half_width: float = Field(default=40.0, gt=0, description="Half of the grid extent")
    n: int = Field(default=4096, ge=MIN_GRID_NODES, description="Number of nodes")

    def to_grid(self) -> Grid1D:
        return Grid1D(self.center, self.half_width, self.n)


class LayerConfig(_Section):
    grid: GridConfig = Field(default_factory=GridConfig, description="Grid of the layer variable")
    tolerance: float = Field(default=1e-6, gt=0, description="Residual certificate")
    max_sweeps: int = Field(default=100_000, ge=1, description="Relaxation sweep limit")
    relaxation: float = Field(default=0.5, gt=0, le=1, description="Pseudo-time step as a fraction of h/π")
    stress_l: float = Field(default=1.0, description="Applied stress for the corrector")


class InitialConfig(_Section):
    kind: InitialKind = Field(default=InitialKind.LOGISTIC, description="Shape of u0")
    center: float = Field(default=0.0, description="Centre of the profile")
    width: float = Field(default=1.0, gt=0, description="Width of the transition")
    amplitude: float = Field(default=1.0, gt=0, description="sup u0 - inf u0")
    offset: float = Field(default=0.0, description="inf u0")
    path: str | None = Field(default=None, description="Field CSV for kind=csv")

    @model_validator(mode="after")
    def _path_for_csv(self) -> InitialConfig:
        if self.kind is InitialKind.CSV and not self.path:
            msg = "Initial profile of kind 'csv' needs a path"
            raise ValueError(msg)
        return self


class MicroConfig(_Section):
    epsilon: float = Field(default=0.1, gt=0, description="Level spacing ε")
    delta: float = Field(default=0.1, gt=0, description="Layer width δ")
    T: float = Field(default=0.5, ge=0, description="Final time")
    snapshot_times: list[float] = Field(default_factory=list, description="Snapshot times (default: 0 and T)")
    half_width: float = Field(default=4.0, gt=0, description="Half extent of the micro grid")
    points_per_layer: float = Field(default=4.0, gt=0, description="Nodes per layer width εδ")
    max_n: int = Field(default=2**17, ge=MIN_GRID_NODES, description="Largest admissible micro grid")
    layered: bool = Field(default=True, description="Start from the layered reconstruction of u0")
    cfl_safety: float = Field(default=1.0, gt=0, le=1, description="Fraction of the CFL budget used")


class MacroConfig(_Section):
    grid: GridConfig = Field(
        default_factory=lambda: GridConfig(half_width=10.0, n=1024), description="Grid of the macro solver"
    )
    T: float = Field(default=1.0, ge=0, description="Final time")
    snapshot_times: list[float] = Field(default_factory=list, description="Snapshot times (default: 0 and T)")
    c0: float | None = Field(default=None, gt=0, description="Mobility (default: from the layer)")
    cfl_safety: float = Field(default=1.0, gt=0, le=1, description="Fraction of the CFL budget used")
    edge_tolerance: float = Field(default=0.02, gt=0, description="Tolerance of the edge-limit check")


class DddConfig(_Section):
    positions: list[float] = Field(default_factory=lambda: [-0.5, 0.5], description="Initial positions y0")
    positions_csv: str | None = Field(default=None, description="CSV of initial positions")
    c0: float | None = Field(default=None, gt=0, description="Mobility (default: from the layer)")
    dt: float = Field(default=1e-3, gt=0, description="Runge-Kutta step")
    T: float = Field(default=1.0, ge=0, description="Final time")
    sample_times: list[float] = Field(default_factory=list, description="Sample times (default: 20 even steps)")
    compare_micro: bool = Field(default=False, description="Also run the micro model from layered data")
    epsilon: float = Field(default=0.05, gt=0, description="ε of the micro comparison")
    delta: float = Field(default=0.05, gt=0, description="δ of the micro comparison")
    tolerance: float = Field(default=0.1, gt=0, description="Relative tolerance of the micro comparison")

    @field_validator("positions")
    @classmethod
    def _non_empty(cls, value: list[float]) -> list[float]:
        if not value:
            msg = "positions must not be empty"
            raise ValueError(msg)
        return value


class ApproxConfig(_Section):
    epsilons: list[float] = Field(default_factory=lambda: [4e-2, 1e-2, 2.5e-3], description="ε sweep")
    r_factor: float = Field(default=1.0, gt=0, description="r = r_factor * ε**r_exponent")
    r_exponent: float = Field(default=0.5, gt=0, le=1, description="r = r_factor * ε**r_exponent")
    n_probes: int = Field(default=200, ge=1, description="Probe points per ε")
    probe_window: tuple[float, float] = Field(default=(-1.5, 1.5), description="Probe interval")
    half_width: float = Field(default=20.0, gt=0, description="Half extent of the profile grid")
    n: int = Field(default=8192, ge=MIN_GRID_NODES, description="Nodes of the profile grid")
    ratio_bounds: tuple[float, float] = Field(default=(1.6, 2.6), description="Admissible error ratio per step")

    @field_validator("epsilons")
    @classmethod
    def _non_empty(cls, value: list[float]) -> list[float]:
        if not value or any(eps <= 0 for eps in value):
            msg = "epsilons must be a non-empty list of positive numbers"
            raise ValueError(msg)
        return value


class ReconstructConfig(_Section):
    pairs: list[tuple[float, float]] = Field(
        default_factory=lambda: [(0.1, 0.1), (0.05, 0.05), (0.025, 0.025)], description="(ε, δ) sweep"
    )
    window: tuple[float, float] = Field(default=(-3.0, 3.0), description="Window of the sup error")
    points_per_layer: float = Field(default=4.0, gt=0, description="Nodes per layer width εδ")
    probe_refinement: int = Field(default=10, ge=2, description="Refinement of the uniformity probe")

    @field_validator("pairs")
    @classmethod
    def _non_empty(cls, value: list[tuple[float, float]]) -> list[tuple[float, float]]:
        if not value or any(eps <= 0 or delta <= 0 for eps, delta in value):
            msg = "pairs must be a non-empty list of positive (epsilon, delta)"
            raise ValueError(msg)
        return value


class ConvergeConfig(_Section):
    epsilons: list[float] = Field(default_factory=lambda: [0.2, 0.1, 0.05], description="ε sweep")
    delta_rule: DeltaRule = Field(default=DeltaRule.EPSILON, description="δ as a function of ε")
    delta_fixed: float = Field(default=0.1, gt=0, description="δ for delta_rule=fixed")
    T: float = Field(default=0.25, ge=0, description="Final time")
    window: tuple[float, float] = Field(default=(-2.0, 2.0), description="Window of the sup error")
    reference_refinement: int = Field(default=4, ge=1, description="Refinement of the macro reference")

    @field_validator("epsilons")
    @classmethod
    def _non_empty(cls, value: list[float]) -> list[float]:
        if not value or any(eps <= 0 for eps in value):
            msg = "epsilons must be a non-empty list of positive numbers"
            raise ValueError(msg)
        return value


class OrowanConfig(_Section):
    epsilon: float = Field(default=0.05, gt=0, description="Level spacing of the tracked points")
    T: float = Field(default=0.5, gt=0, description="Final time")
    probe_time: float = Field(default=0.25, gt=0, description="Time of the velocity measurement")
    half_step: float = Field(default=0.01, gt=0, description="Half width of the velocity difference")
    c0_factor: float = Field(default=2.0, gt=0, description="Mobility multiplier of the rescaled run")
    tolerance: float = Field(default=0.1, gt=0, description="Admissible median relative deviation")
    scaling_tolerance: float = Field(default=0.02, gt=0, description="Admissible deviation of the c0 scaling")
    min_velocity: float = Field(default=1e-3, gt=0, description="Predicted speeds below this are not compared")

    @model_validator(mode="after")
    def _probe_inside_run(self) -> OrowanConfig:
        if not self.half_step < self.probe_time <= self.T - self.half_step:
            msg = f"probe_time must lie in ({self.half_step}, {self.T - self.half_step}]"
            raise ValueError(msg)
        return self


class SimulationConfig(_Section):
    """Complete experiment configuration; every field has a default.

    Used in:
    - api.py
    - reporting.py
    - tool.py
    """

    potential: PotentialConfig = Field(default_factory=PotentialConfig, description="Potential W")
    layer: LayerConfig = Field(default_factory=LayerConfig, description="Layer and corrector solver")
    initial: InitialConfig = Field(default_factory=InitialConfig, description="Initial profile u0")
    micro: MicroConfig = Field(default_factory=MicroConfig, description="Microscopic model")
    macro: MacroConfig = Field(default_factory=MacroConfig, description="Macroscopic model")
    ddd: DddConfig = Field(default_factory=DddConfig, description="Discrete dislocation dynamics")
    approx: ApproxConfig = Field(default_factory=ApproxConfig, description="Particle-sum approximation study")
    reconstruct: ReconstructConfig = Field(default_factory=ReconstructConfig, description="Reconstruction study")
    converge: ConvergeConfig = Field(default_factory=ConvergeConfig, description="Multiscale convergence study")
    orowan: OrowanConfig = Field(default_factory=OrowanConfig, description="Orowan proportionality check")
    workers: int = Field(default=1, ge=1, description="Threads for per-ε simulations")
    seed: int = Field(default=0, ge=0, description="Seed of the random probes")
