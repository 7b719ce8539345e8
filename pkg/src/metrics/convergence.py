"""Order-of-accuracy studies against a known or integrated reference.

The local error of a scheme on mesh N is the largest configuration error
after one implicit step started on the reference at every knot; the
global error is the configuration error at t_f after stepping through the
whole mesh from the reference initial state. Slopes are fitted in log-log
over h.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from core.errors import CollocationError, ValidationError
from core.interfaces import ReferenceTrajectory
from core.models import Mesh, SchemeId
from model.ocp import OcpDefinition
from schemes.steps import hs_midpoint, hs_step, tz_step
from transcribe.transcription import prepare_problem

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-12
REFERENCE_TOL = 1e-12
MAX_FIXED_POINT_ITERS = 200


@dataclass(frozen=True)
class ConvergenceRow:
    N: int
    h: float
    local_error: float
    global_error: float


@dataclass(frozen=True)
class ConvergenceTable:
    """Errors per mesh and fitted log-log slopes (None when the errors are exact)."""

    method: str
    rows: Tuple[ConvergenceRow, ...]
    local_slope: Optional[float]
    global_slope: Optional[float]

    @property
    def local_exact(self) -> bool:
        return self.local_slope is None

    @property
    def global_exact(self) -> bool:
        return self.global_slope is None

    @property
    def fitted_order(self) -> Optional[float]:
        # local error ~ h^(p+1)
        return None if self.local_slope is None else self.local_slope - 1.0


@dataclass(frozen=True)
class IntegratedReference:
    """Dense-output reference from a high-accuracy adaptive integrator."""

    dense: Callable[[np.ndarray], np.ndarray]
    control_fn: Callable[[float], np.ndarray]
    n_u: int

    def state(self, t) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        return np.moveaxis(np.asarray(self.dense(t_arr)), 0, -1)

    def control(self, t) -> np.ndarray:
        t_arr = np.asarray(t, dtype=float)
        flat = [np.asarray(self.control_fn(float(ti)), dtype=float).reshape(self.n_u) for ti in t_arr.reshape(-1)]
        return np.asarray(flat).reshape(t_arr.shape + (self.n_u,))


def integrate_reference(
    ocp: OcpDefinition,
    x0,
    *,
    control: Optional[Callable[[float], np.ndarray]] = None,
    t_f: Optional[float] = None,
) -> IntegratedReference:
    """Integrate the first-order form with DOP853 at rtol = atol = 1e-12."""
    problem = ocp.base
    M, n_q, n_u = problem.order, problem.n_q, problem.n_u
    control_fn = control or (lambda t: np.zeros(n_u))
    x0 = np.asarray(x0, dtype=float).reshape(-1)
    if x0.shape != (problem.n_x,):
        raise ValidationError(f"x0 must have {problem.n_x} entries")

    def rhs(t: float, x: np.ndarray) -> np.ndarray:
        u = np.asarray(control_fn(t), dtype=float).reshape(1, n_u)
        g = problem.dynamics(x.reshape(1, M, n_q), u, np.array([t]))
        return np.concatenate([x[n_q:], np.asarray(g, dtype=float).reshape(n_q)])

    horizon = problem.t_f if t_f is None else float(t_f)
    sol = solve_ivp(
        rhs,
        (0.0, horizon),
        x0,
        method="DOP853",
        rtol=REFERENCE_TOL,
        atol=REFERENCE_TOL,
        dense_output=True,
    )
    if not sol.success:
        raise CollocationError(f"Reference integration failed: {sol.message}")
    return IntegratedReference(dense=sol.sol, control_fn=control_fn, n_u=n_u)


def _implicit_step(
    problem: OcpDefinition,
    scheme: SchemeId,
    y_k: np.ndarray,
    t_k: np.ndarray,
    u_k: np.ndarray,
    u_c: np.ndarray,
    u_k1: np.ndarray,
    h: float,
    guess: np.ndarray,
) -> np.ndarray:
    """Solve one collocation step for y_{k+1} by fixed-point iteration.

    Levels on axis 0, intervals on axis 1: y_k has shape (M, K, n_q).
    """
    M = problem.order

    def g(y: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.asarray(problem.dynamics(np.moveaxis(y, 0, 1), u, t), dtype=float)

    g_k = g(y_k, u_k, t_k)
    y = guess
    for _ in range(MAX_FIXED_POINT_ITERS):
        g_k1 = g(y, u_k1, t_k + h)
        if scheme.is_hermite_simpson:
            y_c = hs_midpoint(M, y_k, y, g_k, g_k1, h)
            g_c = g(y_c, u_c, t_k + 0.5 * h)
            y_new, _ = hs_step(M, y_k, None, g_k, g_c, g_k1, h, eliminate_gc=False)
        else:
            y_new = tz_step(M, y_k, g_k, g_k1, h)
        if np.max(np.abs(y_new - y)) <= 1e-15 * (1.0 + np.max(np.abs(y_new))):
            return y_new
        y = y_new
    logger.warning("fixed-point step did not settle within %d iterations", MAX_FIXED_POINT_ITERS)
    return y


def _slope(h: np.ndarray, err: np.ndarray) -> Optional[float]:
    keep = err > EXACT_TOL
    if np.count_nonzero(keep) < 2:
        return None
    return float(np.polyfit(np.log(h[keep]), np.log(err[keep]), 1)[0])


def convergence_study(
    ocp: OcpDefinition,
    scheme: SchemeId,
    N_list: Sequence[int],
    reference: ReferenceTrajectory,
) -> ConvergenceTable:
    """Local and global configuration errors over a sequence of meshes.

    Errors at or below 1e-12 count as exact; a slope is fitted only over
    the remaining meshes and is None when fewer than two remain.

    Raises:
      ValidationError when N_list has fewer than 3 entries or is not
      strictly increasing.
    """
    Ns = [int(n) for n in N_list]
    if len(Ns) < 3:
        raise ValidationError("N_list needs at least 3 entries")
    if any(b <= a for a, b in zip(Ns, Ns[1:])):
        raise ValidationError("N_list must be strictly increasing")

    problem = prepare_problem(ocp, scheme)
    M, n_q = problem.order, problem.n_q
    n_conf = ocp.base.n_q

    def levels(X: np.ndarray) -> np.ndarray:
        return np.moveaxis(X.reshape(X.shape[0], M, n_q), 1, 0)

    rows = []
    for N in Ns:
        mesh = Mesh(N, ocp.t_f)
        h, knots = mesh.h, mesh.knots
        X = np.asarray(reference.state(knots), dtype=float).reshape(N + 1, -1)
        U = np.asarray(reference.control(knots), dtype=float).reshape(N + 1, -1)
        Uc = np.asarray(reference.control(mesh.midpoints), dtype=float).reshape(N, -1)

        y_local = _implicit_step(problem, scheme, levels(X[:-1]), knots[:-1], U[:-1], Uc, U[1:], h, levels(X[1:]))
        local = float(np.max(np.abs(y_local[0, :, :n_conf] - X[1:, :n_conf])))

        y = levels(X[:1])
        for k in range(N):
            y = _implicit_step(problem, scheme, y, knots[k : k + 1], U[k : k + 1], Uc[k : k + 1], U[k + 1 : k + 2], h, y)
        global_err = float(np.max(np.abs(y[0, 0, :n_conf] - X[-1, :n_conf])))

        rows.append(ConvergenceRow(N=N, h=h, local_error=local, global_error=global_err))
        logger.debug("%s N=%d local=%.3e global=%.3e", scheme.label, N, local, global_err)

    hs = np.array([r.h for r in rows])
    return ConvergenceTable(
        method=scheme.label,
        rows=tuple(rows),
        local_slope=_slope(hs, np.array([r.local_error for r in rows])),
        global_slope=_slope(hs, np.array([r.global_error for r in rows])),
    )
