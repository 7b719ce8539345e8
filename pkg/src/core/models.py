"""Immutable dataclasses shared by the collocation packages.

Includes the scheme identity (SchemeId), the uniform time mesh (Mesh),
derivative stacks (StateStack), solver options and results
(SolveOptions, Solution) and the experiment description used by the CLI
and MCP tools (ExperimentConfig).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Tuple

import numpy as np

from config import (
    DEFAULT_KKT_TOL,
    DEFAULT_MAX_INNER_ITERS,
    DEFAULT_MAX_OUTER_ITERS,
    DEFAULT_PENALTY_GROWTH,
    DEFAULT_PENALTY_INIT,
    DEFAULT_SAMPLES_PER_INTERVAL,
)
from core.errors import DimensionError, ValidationError

# factorials are exact up to (M + 2)!, M <= MAX_ORDER
MAX_ORDER = 18


class Family(str, Enum):
    TRAPEZOIDAL = "trapezoidal"
    HERMITE_SIMPSON = "hermite_simpson"


class HSForm(str, Enum):
    SEPARATED = "separated"
    COMPRESSED = "compressed"


class ControlInterp(str, Enum):
    PIECEWISE_LINEAR = "piecewise_linear"
    PIECEWISE_QUADRATIC = "piecewise_quadratic"


@dataclass(frozen=True)
class SchemeId:
    """Which collocation method governs transcription and interpolation.

    The per-interval polynomial has degree ``d = M + s - 1`` with ``s = 2``
    collocation points for the trapezoidal family and ``s = 3`` for
    Hermite-Simpson. ``hs_form`` only matters for Hermite-Simpson.
    """

    family: Family
    order: int
    hs_form: HSForm = HSForm.SEPARATED

    def __post_init__(self) -> None:
        if not isinstance(self.order, (int, np.integer)) or isinstance(self.order, bool):
            raise ValidationError(f"Scheme order must be an integer, got {self.order!r}")
        if self.order < 1:
            raise ValidationError("Scheme order must be >= 1")
        if self.order > MAX_ORDER:
            raise ValidationError(f"Scheme order must be <= {MAX_ORDER}")
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "hs_form", HSForm(self.hs_form))

    @property
    def is_hermite_simpson(self) -> bool:
        return self.family is Family.HERMITE_SIMPSON

    @property
    def is_compressed(self) -> bool:
        return self.is_hermite_simpson and self.hs_form is HSForm.COMPRESSED

    @property
    def n_collocation(self) -> int:
        return 3 if self.is_hermite_simpson else 2

    @property
    def degree(self) -> int:
        return self.order + self.n_collocation - 1

    @property
    def min_order(self) -> int:
        # guaranteed order of accuracy p >= d
        return self.degree

    @property
    def known_order(self) -> int:
        if self.is_hermite_simpson and self.order == 1:
            return 4
        return self.min_order

    @property
    def exactness_degree(self) -> int:
        return self.degree

    @property
    def control_interp(self) -> ControlInterp:
        if self.is_hermite_simpson:
            return ControlInterp.PIECEWISE_QUADRATIC
        return ControlInterp.PIECEWISE_LINEAR

    @property
    def label(self) -> str:
        prefix = "hs" if self.is_hermite_simpson else "tz"
        return f"{prefix}{self.order}"


@dataclass(frozen=True)
class Mesh:
    """Uniform partition of [0, t_f] into N intervals of width h."""

    N: int
    t_f: float

    def __post_init__(self) -> None:
        if isinstance(self.N, bool) or not isinstance(self.N, (int, np.integer)):
            raise ValidationError(f"N must be an integer, got {self.N!r}")
        if self.N < 1:
            raise ValidationError("N must be >= 1")
        if not np.isfinite(self.t_f) or self.t_f <= 0:
            raise ValidationError("t_f must be a positive finite number")
        object.__setattr__(self, "N", int(self.N))
        object.__setattr__(self, "t_f", float(self.t_f))

    @property
    def h(self) -> float:
        return self.t_f / self.N

    @property
    def knots(self) -> np.ndarray:
        return self.h * np.arange(self.N + 1)

    @property
    def midpoints(self) -> np.ndarray:
        return self.knots[:-1] + 0.5 * self.h


@dataclass(frozen=True)
class StateStack:
    """Derivative stack (q, q', ..., q^(M-1)) at one time instant."""

    levels: np.ndarray
    time: float = 0.0

    def __post_init__(self) -> None:
        arr = np.asarray(self.levels, dtype=float)
        if arr.ndim != 2 or arr.shape[0] < 1:
            raise DimensionError(f"StateStack needs an (M, n_q) array, got shape {arr.shape}")
        object.__setattr__(self, "levels", arr)

    @property
    def order(self) -> int:
        return self.levels.shape[0]

    @property
    def n_q(self) -> int:
        return self.levels.shape[1]

    def flat(self) -> np.ndarray:
        # level-major: (q1..q_nq, dq1..dq_nq, ...)
        return self.levels.reshape(-1)

    @classmethod
    def from_flat(cls, x: np.ndarray, order: int, time: float = 0.0) -> "StateStack":
        arr = np.asarray(x, dtype=float)
        if arr.ndim != 1 or order < 1 or arr.size % order:
            raise DimensionError(f"Cannot split a state of size {arr.size} into {order} levels")
        return cls(arr.reshape(order, -1), time)


@dataclass(frozen=True)
class SolveOptions:
    """Augmented-Lagrangian solver settings.

    ``fd_step`` is the relative central-difference step; the step used for
    variable i is ``fd_step * max(1, |x_i|)``.
    """

    kkt_tol: float = DEFAULT_KKT_TOL
    max_outer_iters: int = DEFAULT_MAX_OUTER_ITERS
    max_inner_iters: int = DEFAULT_MAX_INNER_ITERS
    penalty_init: float = DEFAULT_PENALTY_INIT
    penalty_growth: float = DEFAULT_PENALTY_GROWTH
    fd_step: float = float(np.finfo(float).eps ** (1.0 / 3.0))

    def __post_init__(self) -> None:
        for name in ("kkt_tol", "penalty_init", "fd_step"):
            value = getattr(self, name)
            if not np.isfinite(value) or value <= 0:
                raise ValidationError(f"{name} must be positive")
        for name in ("max_outer_iters", "max_inner_iters"):
            if getattr(self, name) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if not self.penalty_growth > 1:
            raise ValidationError("penalty_growth must be > 1")


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    MAX_ITERS = "max_iters"
    DIVERGED = "diverged"


@dataclass(frozen=True)
class Solution:
    """Result of a solve.

    Field groups:
    - Iterate: z, cost, eq_multipliers, ineq_multipliers
    - Diagnostics: kkt_residual, constraint_violation, iterations,
      inner_iterations, status, message
    """

    z: np.ndarray
    cost: float
    kkt_residual: float
    constraint_violation: float
    iterations: int
    status: SolveStatus

    inner_iterations: int = 0
    message: str = ""
    eq_multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))
    ineq_multipliers: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def converged(self) -> bool:
        return self.status is SolveStatus.CONVERGED


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment as configured from a file, flags or an MCP call.

    Field groups:
    - Selection: problem, method, methods, hs_form
    - Mesh: N, N_list, fair
    - Run: options, warm_start, samples_per_interval, timing
    - Output: out_dir
    """

    problem: str
    method: str = "hs2"
    methods: Tuple[str, ...] = ()
    hs_form: HSForm = HSForm.SEPARATED

    N: int = 25
    N_list: Tuple[int, ...] = ()
    fair: bool = False

    options: SolveOptions = field(default_factory=SolveOptions)
    warm_start: bool = False
    samples_per_interval: int = DEFAULT_SAMPLES_PER_INTERVAL
    timing: bool = True

    out_dir: Path = Path("results")
