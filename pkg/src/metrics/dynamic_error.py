"""Dynamic-error diagnostics of reconstructed trajectories.

eps1 is the kinematic error: for trajectories of lifted problems (first
order schemes) it is d/dt(config interpolant) - (velocity interpolant);
order-M schemes make it identically zero. eps2 is the dynamics residual
q^(M)(t) - g(q(t), q'(t), ..., u(t), t) with every derivative taken from
the configuration interpolant and u from the control interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.integrate import simpson

from config import DEFAULT_SAMPLES_PER_INTERVAL
from core.errors import DimensionError, UnitMismatchError, ValidationError
from model.ocp import OcpDefinition
from schemes.interpolant import (
    PolyTrajectory,
    Side,
    controls_on_intervals,
    evaluate_on_intervals,
    locate,
)


def _config_view(traj: PolyTrajectory, ocp: OcpDefinition) -> Tuple[OcpDefinition, bool]:
    base = ocp.base
    lifted = traj.order == 1 and base.order > 1
    expected = base.order * base.n_q if lifted else base.n_q
    if traj.n_q != expected:
        raise DimensionError(f"Trajectory has {traj.n_q} coordinates, problem expects {expected}")
    if not lifted and traj.order != base.order:
        raise DimensionError(f"Trajectory order {traj.order} does not match problem order {base.order}")
    return base, lifted


def _residuals(
    traj: PolyTrajectory, ocp: OcpDefinition, r: int, idx: np.ndarray, tau: np.ndarray, t: np.ndarray
) -> np.ndarray:
    base, lifted = _config_view(traj, ocp)
    M, n_q = base.order, base.n_q

    def config(level: int) -> np.ndarray:
        return evaluate_on_intervals(traj, idx, tau, level)[:, :n_q]

    if r == 1:
        if not lifted:
            return np.zeros((idx.size, n_q))
        velocity = evaluate_on_intervals(traj, idx, tau, 0)[:, n_q : 2 * n_q]
        return config(1) - velocity

    stack = np.stack([config(j) for j in range(M)], axis=1)
    u = controls_on_intervals(traj, idx, tau)
    g = np.asarray(base.dynamics(stack, u, t), dtype=float)
    return config(M) - g


def _check_order(r: int) -> None:
    if r not in (1, 2):
        raise ValidationError(f"Dynamic error order must be 1 or 2, got {r!r}")


def dynamic_error(traj: PolyTrajectory, ocp: OcpDefinition, r: int, t, *, side: Side = "right") -> np.ndarray:
    """eps^[r] at time(s) t, shape (n_q,) or (K, n_q) per configuration coordinate."""
    _check_order(r)
    idx, tau = locate(traj, t, side)
    t_arr = traj.knots[idx] + tau
    out = _residuals(traj, ocp, r, idx, tau, t_arr)
    return out[0] if np.ndim(t) == 0 else out


@dataclass(frozen=True)
class ErrorReport:
    """Sampled dynamic errors and their integrals.

    Samples are taken per interval on S+1 uniform points including both
    ends, so every knot appears twice (left and right limit).
    """

    sample_times: np.ndarray
    eps1: np.ndarray
    eps2: np.ndarray
    E1: np.ndarray
    E2: np.ndarray
    E1_joint: Optional[float]
    E2_joint: Optional[float]
    units: Tuple[str, ...]
    samples_per_interval: int

    def summary(self, which: int) -> Dict[str, Optional[float]]:
        values = self.E1 if which == 1 else self.E2
        joint = self.E1_joint if which == 1 else self.E2_joint
        out: Dict[str, Optional[float]] = {f"q{i + 1}": float(v) for i, v in enumerate(values)}
        out["joint"] = joint
        return out


def integrate_errors(
    traj: PolyTrajectory,
    ocp: OcpDefinition,
    samples_per_interval: int = DEFAULT_SAMPLES_PER_INTERVAL,
    *,
    joint: Optional[bool] = None,
) -> ErrorReport:
    """E^[r]_i = integral of |eps^[r]_i| over [0, t_f] by composite Simpson.

    Joint integrals sum |eps| over coordinates; they are computed when all
    coordinates share a unit (``joint=None``), skipped with ``joint=False``
    and required with ``joint=True``.

    Raises:
      ValidationError for fewer than 10 or an odd number of samples;
      UnitMismatchError when joint=True and units differ.
    """
    S = samples_per_interval
    if isinstance(S, bool) or not isinstance(S, (int, np.integer)) or S < 10 or S % 2:
        raise ValidationError("samples_per_interval must be an even integer >= 10")

    base, _ = _config_view(traj, ocp)
    units = base.units
    same_units = len(set(units)) == 1
    if joint and not same_units:
        raise UnitMismatchError(f"Joint error needs a single unit, got {sorted(set(units))}")
    with_joint = same_units if joint is None else joint

    N = traj.N
    idx = np.repeat(np.arange(N), S + 1)
    tau = np.tile(traj.h * np.arange(S + 1) / S, N)
    tau[S :: S + 1] = traj.h
    t = traj.knots[idx] + tau

    eps1 = _residuals(traj, ocp, 1, idx, tau, t)
    eps2 = _residuals(traj, ocp, 2, idx, tau, t)

    def integral(eps: np.ndarray) -> np.ndarray:
        per_interval = np.abs(eps).reshape(N, S + 1, -1)
        return simpson(per_interval, dx=traj.h / S, axis=1).sum(axis=0)

    E1 = integral(eps1)
    E2 = integral(eps2)
    return ErrorReport(
        sample_times=t,
        eps1=eps1,
        eps2=eps2,
        E1=E1,
        E2=E2,
        E1_joint=float(E1.sum()) if with_joint else None,
        E2_joint=float(E2.sum()) if with_joint else None,
        units=units,
        samples_per_interval=S,
    )
