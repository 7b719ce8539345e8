"""Core protocol and callable definitions.

Callables registered on an OcpDefinition are vectorized over leading
axes so a whole mesh can be evaluated in one call:

- dynamics(levels (..., M, n_q), u (..., n_u), t (...)) -> (..., n_q)
- running_cost(x (..., n_x), u (..., n_u), t (...)) -> (...)
- terminal_cost(x_f (n_x,), t_f) -> float
- path_constraints(x (..., n_x), u (..., n_u)) -> (..., n_p), <= 0 when met
- boundary_constraints(x_0 (n_x,), x_f (n_x,), t_f) -> (n_b,), = 0 when met

States ``x`` are flat and level-major: (q_1..q_nq, dq_1..dq_nq, ...).
"""

from __future__ import annotations

from typing import Callable, Protocol

import numpy as np


DynamicsFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
RunningCostFn = Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]
TerminalCostFn = Callable[[np.ndarray, float], float]
PathConstraintFn = Callable[[np.ndarray, np.ndarray], np.ndarray]
BoundaryConstraintFn = Callable[[np.ndarray, np.ndarray, float], np.ndarray]
VectorFn = Callable[[np.ndarray], np.ndarray]


class ReferenceTrajectory(Protocol):
    """Contract for a known solution used by convergence studies."""

    def state(self, t: np.ndarray) -> np.ndarray:
        """Flat level-major state at times t, shape (..., n_x)."""
        ...

    def control(self, t: np.ndarray) -> np.ndarray:
        """Control at times t, shape (..., n_u)."""
        ...
