"""Continuous optimal-control problems with explicit Mth-order dynamics.

An OcpDefinition holds the dynamics q^(M) = g(q, q', ..., q^(M-1), u, t),
the running and terminal costs, path and boundary constraints and the
fixed final time. ``lift_to_first_order`` rewrites it in chain form so the
first-order schemes can transcribe it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from core.errors import DimensionError, ValidationError
from core.interfaces import (
    BoundaryConstraintFn,
    DynamicsFn,
    PathConstraintFn,
    RunningCostFn,
    TerminalCostFn,
)
from core.models import MAX_ORDER, StateStack

Bounds = Tuple[np.ndarray, np.ndarray]


def _zero_running_cost(x: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.zeros(np.shape(t))


def _as_bounds(bounds, size: int, what: str) -> Optional[Bounds]:
    if bounds is None:
        return None
    lower, upper = bounds
    lo = np.broadcast_to(np.asarray(lower, dtype=float), (size,)).copy()
    hi = np.broadcast_to(np.asarray(upper, dtype=float), (size,)).copy()
    if np.any(lo > hi):
        raise ValidationError(f"{what}: lower bound exceeds upper bound")
    return lo, hi


@dataclass(frozen=True)
class OcpDefinition:
    """A fixed-final-time optimal-control problem.

    Field groups:
    - Dimensions: n_q, n_u, order (n_x = order * n_q)
    - Dynamics and costs: dynamics, running_cost, terminal_cost
    - Constraints: boundary_constraints (n_b rows), path_constraints
      (n_p rows), control_bounds, state_bounds, path_at_midpoints
    - Horizon: t_f
    - Metadata: units (one per configuration coordinate), name,
      lifted_from (the Mth-order problem a lifted one came from)
    """

    n_q: int
    n_u: int
    order: int
    dynamics: DynamicsFn
    t_f: float

    running_cost: RunningCostFn = _zero_running_cost
    terminal_cost: Optional[TerminalCostFn] = None

    boundary_constraints: Optional[BoundaryConstraintFn] = None
    n_b: int = 0
    path_constraints: Optional[PathConstraintFn] = None
    n_p: int = 0
    control_bounds: Optional[Bounds] = None
    state_bounds: Optional[Bounds] = None
    path_at_midpoints: bool = False

    units: Tuple[str, ...] = ()
    name: str = ""
    lifted_from: Optional["OcpDefinition"] = None

    def __post_init__(self) -> None:
        if self.n_q < 1 or self.n_u < 1:
            raise ValidationError("n_q and n_u must be >= 1")
        if not 1 <= self.order <= MAX_ORDER:
            raise ValidationError(f"order must be within 1..{MAX_ORDER}")
        if not np.isfinite(self.t_f) or self.t_f <= 0:
            raise ValidationError("t_f must be positive")
        if (self.boundary_constraints is None) != (self.n_b == 0):
            raise ValidationError("n_b must be > 0 exactly when boundary_constraints is set")
        if (self.path_constraints is None) != (self.n_p == 0):
            raise ValidationError("n_p must be > 0 exactly when path_constraints is set")

        units = tuple(self.units) if self.units else ("",) * self.n_q
        if len(units) != self.n_q:
            raise ValidationError(f"Expected {self.n_q} units, got {len(units)}")
        object.__setattr__(self, "units", units)
        object.__setattr__(self, "t_f", float(self.t_f))
        object.__setattr__(self, "control_bounds", _as_bounds(self.control_bounds, self.n_u, "control_bounds"))
        object.__setattr__(self, "state_bounds", _as_bounds(self.state_bounds, self.n_x, "state_bounds"))

    @property
    def n_x(self) -> int:
        return self.order * self.n_q

    @property
    def base(self) -> "OcpDefinition":
        """The problem before any lifting."""
        return self.lifted_from if self.lifted_from is not None else self


def eval_dynamics(ocp: OcpDefinition, s: StateStack, u, t: float) -> np.ndarray:
    """Return q^(M) at one derivative stack, control and time."""
    if s.levels.shape != (ocp.order, ocp.n_q):
        raise DimensionError(f"State stack must have shape {(ocp.order, ocp.n_q)}, got {s.levels.shape}")
    u_arr = np.asarray(u, dtype=float).reshape(-1)
    if u_arr.shape != (ocp.n_u,):
        raise DimensionError(f"Control must have {ocp.n_u} entries, got {u_arr.size}")

    out = np.asarray(ocp.dynamics(s.levels, u_arr, np.float64(t)), dtype=float)
    if out.shape != (ocp.n_q,):
        raise DimensionError(f"dynamics returned shape {out.shape}, expected {(ocp.n_q,)}")
    return out


def _lifted_units(units: Tuple[str, ...], order: int) -> Tuple[str, ...]:
    out = []
    for j in range(order):
        for unit in units:
            if j == 0 or not unit:
                out.append(unit)
            elif j == 1:
                out.append(f"{unit}/s")
            else:
                out.append(f"{unit}/s^{j}")
    return tuple(out)


def lift_to_first_order(ocp: OcpDefinition) -> OcpDefinition:
    """Rewrite x^(M) = g as the chain x' = (x_2, ..., x_M, g).

    Costs, constraints and bounds act on the same flat state and are
    forwarded unchanged. First-order problems are returned as is.
    """
    if ocp.order == 1:
        return ocp

    order, n_q = ocp.order, ocp.n_q
    g = ocp.dynamics

    def chain(levels: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        x = levels[..., 0, :]
        stack = x.reshape(x.shape[:-1] + (order, n_q))
        return np.concatenate([x[..., n_q:], g(stack, u, t)], axis=-1)

    return dataclasses.replace(
        ocp,
        n_q=order * n_q,
        order=1,
        dynamics=chain,
        units=_lifted_units(ocp.units, order),
        lifted_from=ocp,
    )
