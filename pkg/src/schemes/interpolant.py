"""Continuous trajectories reconstructed from collocation samples.

A PolyTrajectory stores the coefficient form of every interval polynomial
(one row of d+1 coefficients per coordinate) together with the control
samples. Evaluation picks the owning interval with ``side``: "right"
assigns an interior knot to the interval that starts there, "left" to
the interval that ends there (the left limit).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Tuple

import numpy as np

from core.errors import DimensionError, OutOfMeshError, ValidationError
from core.models import ControlInterp, Mesh, SchemeId
from schemes.steps import hs_coefficients, taylor_eval, tz_coefficients

Side = Literal["left", "right"]


@dataclass(frozen=True)
class PolyTrajectory:
    """Piecewise-polynomial trajectory over a uniform mesh.

    Field groups:
    - Polynomials: scheme, coeffs (N, n_q, d+1), knots (N+1,), h
    - Controls: controls (N+1, n_u), mid_controls (N, n_u) for
      Hermite-Simpson, interpolated by ``scheme.control_interp``
    """

    scheme: SchemeId
    coeffs: np.ndarray
    knots: np.ndarray
    h: float
    controls: np.ndarray
    mid_controls: Optional[np.ndarray] = None

    @property
    def N(self) -> int:
        return self.coeffs.shape[0]

    @property
    def n_q(self) -> int:
        return self.coeffs.shape[1]

    @property
    def n_u(self) -> int:
        return self.controls.shape[1]

    @property
    def order(self) -> int:
        return self.scheme.order

    @property
    def degree(self) -> int:
        return self.coeffs.shape[2] - 1

    @property
    def control_interp(self) -> ControlInterp:
        return self.scheme.control_interp


def build_interpolant(
    scheme: SchemeId,
    knot_values,
    dynamics_samples,
    mesh: Mesh,
    *,
    controls=None,
    mid_controls=None,
) -> PolyTrajectory:
    """Build the per-interval polynomials from collocation samples.

    Params:
      - knot_values: derivative stacks at the knots, shape (N, M, n_q) or
        (N+1, M, n_q); only the first N start an interval.
      - dynamics_samples: g at the knots, shape (N+1, n_q), or for
        Hermite-Simpson at knots and midpoints in time order, (2N+1, n_q).
      - controls / mid_controls: (N+1, n_u) and (N, n_u); default to
        zero-width control arrays.

    Raises:
      DimensionError when sample counts do not match the scheme and mesh.
    """
    M, N, h = scheme.order, mesh.N, mesh.h

    y = np.asarray(knot_values, dtype=float)
    if y.ndim != 3 or y.shape[0] not in (N, N + 1) or y.shape[1] != M:
        raise DimensionError(f"knot_values must have shape ({N} or {N + 1}, {M}, n_q), got {y.shape}")
    n_q = y.shape[2]

    g = np.asarray(dynamics_samples, dtype=float)
    n_samples = 2 * N + 1 if scheme.is_hermite_simpson else N + 1
    if g.shape != (n_samples, n_q):
        raise DimensionError(f"dynamics_samples must have shape {(n_samples, n_q)}, got {g.shape}")

    u = np.zeros((N + 1, 0)) if controls is None else np.asarray(controls, dtype=float)
    if u.ndim != 2 or u.shape[0] != N + 1:
        raise DimensionError(f"controls must have {N + 1} rows, got shape {u.shape}")

    uc = None
    if scheme.is_hermite_simpson:
        uc = np.zeros((N, u.shape[1])) if mid_controls is None else np.asarray(mid_controls, dtype=float)
        if uc.shape != (N, u.shape[1]):
            raise DimensionError(f"mid_controls must have shape {(N, u.shape[1])}, got {uc.shape}")

    y_k = np.moveaxis(y[:N], 1, 0)
    if scheme.is_hermite_simpson:
        a = hs_coefficients(M, y_k, g[0:-1:2], g[1::2], g[2::2], h)
    else:
        a = tz_coefficients(M, y_k, g[:-1], g[1:], h)

    return PolyTrajectory(
        scheme=scheme,
        coeffs=np.moveaxis(a, 0, -1).copy(),
        knots=mesh.knots,
        h=h,
        controls=u,
        mid_controls=uc,
    )


def locate(traj: PolyTrajectory, t, side: Side = "right") -> Tuple[np.ndarray, np.ndarray]:
    """Owning interval index and local time tau for each t."""
    if side not in ("left", "right"):
        raise ValidationError(f"side must be 'left' or 'right', got {side!r}")
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    t0, tN = float(traj.knots[0]), float(traj.knots[-1])
    tol = 1e-12 * max(1.0, abs(tN))
    if not np.all(np.isfinite(t_arr)) or np.any(t_arr < t0 - tol) or np.any(t_arr > tN + tol):
        raise OutOfMeshError(f"t must lie within [{t0}, {tN}]")
    t_arr = np.clip(t_arr, t0, tN)

    idx = np.searchsorted(traj.knots, t_arr, side=side) - 1
    idx = np.clip(idx, 0, traj.N - 1)
    tau = np.clip(t_arr - traj.knots[idx], 0.0, traj.h)
    # snap to the interval ends so knot values match the step outputs
    tau = np.where(np.abs(tau - traj.h) <= tol, traj.h, tau)
    tau = np.where(tau <= tol, 0.0, tau)
    return idx, tau


def evaluate_on_intervals(traj: PolyTrajectory, idx: np.ndarray, tau: np.ndarray, r: int) -> np.ndarray:
    """r-th derivative on given intervals, shape (K, n_q); r may exceed M."""
    a = np.moveaxis(traj.coeffs[idx], -1, 0)
    return taylor_eval(a, tau[:, None], r)


def controls_on_intervals(traj: PolyTrajectory, idx: np.ndarray, tau: np.ndarray) -> np.ndarray:
    u_k = traj.controls[idx]
    u_k1 = traj.controls[idx + 1]
    s = (tau / traj.h)[:, None]
    if traj.control_interp is ControlInterp.PIECEWISE_LINEAR:
        return u_k + s * (u_k1 - u_k)
    u_c = traj.mid_controls[idx]
    return u_k * (2.0 * s - 1.0) * (s - 1.0) + 4.0 * u_c * s * (1.0 - s) + u_k1 * s * (2.0 * s - 1.0)


def eval_interpolant(traj: PolyTrajectory, t, r: int = 0, *, side: Side = "right") -> np.ndarray:
    """r-th derivative (0 <= r <= M) of the configuration at t.

    Returns shape (n_q,) for scalar t, (K, n_q) for an array of times.
    """
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or not 0 <= r <= traj.order:
        raise ValidationError(f"Derivative order must be within 0..{traj.order}, got {r!r}")
    idx, tau = locate(traj, t, side)
    out = evaluate_on_intervals(traj, idx, tau, int(r))
    return out[0] if np.ndim(t) == 0 else out


def eval_control(traj: PolyTrajectory, t, *, side: Side = "right") -> np.ndarray:
    """Control at t: piecewise linear (trapezoidal) or per-interval quadratic."""
    idx, tau = locate(traj, t, side)
    out = controls_on_intervals(traj, idx, tau)
    return out[0] if np.ndim(t) == 0 else out
