"""Flattened nonlinear programs and the transcription entry point."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from core.errors import DimensionError
from core.interfaces import VectorFn
from core.models import Mesh, SchemeId
from model.ocp import OcpDefinition
from transcribe.layout import VariableLayout
from transcribe.quadrature import cost_terms
from transcribe.transcription import Transcription

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProblemSize:
    n_vars: int
    n_eq: int
    n_dof: int


def problem_size(scheme: SchemeId, n_x: int, n_u: int, n_b: int, N: int) -> ProblemSize:
    """Variable, equality and degree-of-freedom counts of a transcription.

    Equalities are the collocation rows plus the n_b boundary rows, so
    n_dof = n_x + (N+1) n_u - n_b (trapezoidal) or n_x + (2N+1) n_u - n_b
    (Hermite-Simpson, either form).
    """
    if not scheme.is_hermite_simpson:
        n_vars = (N + 1) * (n_x + n_u)
        n_eq = n_x * N + n_b
    elif scheme.is_compressed:
        n_vars = (N + 1) * n_x + (2 * N + 1) * n_u
        n_eq = n_x * N + n_b
    else:
        n_vars = (2 * N + 1) * (n_x + n_u)
        n_eq = 2 * n_x * N + n_b
    return ProblemSize(n_vars=n_vars, n_eq=n_eq, n_dof=n_vars - n_eq)


def _empty(z: np.ndarray) -> np.ndarray:
    return np.zeros(0)


@dataclass(frozen=True)
class Nlp:
    """Finite-dimensional program: min sum(cost_terms) s.t. eq = 0, ineq <= 0, bounds.

    The solver differentiates the stacked vector [cost_terms; eq; ineq].
    ``sparsity`` is its boolean pattern (rows x n_vars), ``jacobian`` an
    optional analytic Jacobian of it.
    """

    n_vars: int
    cost_terms: VectorFn
    eq_constraints: VectorFn
    ineq_constraints: VectorFn
    n_cost_terms: int
    n_eq: int
    n_ineq: int
    lower: np.ndarray
    upper: np.ndarray

    sparsity: Optional[np.ndarray] = None
    jacobian: Optional[VectorFn] = None
    stacked_fn: Optional[VectorFn] = None

    layout: Optional[VariableLayout] = None
    transcription: Optional[Transcription] = None

    @property
    def n_dof(self) -> int:
        return self.n_vars - self.n_eq

    def cost(self, z) -> float:
        return float(np.sum(self.cost_terms(np.asarray(z, dtype=float))))

    def stacked(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.stacked_fn is not None:
            return self.stacked_fn(z)
        return np.concatenate(
            [
                np.atleast_1d(self.cost_terms(z)),
                np.atleast_1d(self.eq_constraints(z)),
                np.atleast_1d(self.ineq_constraints(z)),
            ]
        ).astype(float)

    @classmethod
    def from_functions(
        cls,
        n_vars: int,
        cost: Callable[[np.ndarray], float],
        *,
        eq: Optional[VectorFn] = None,
        ineq: Optional[VectorFn] = None,
        lower=None,
        upper=None,
        jacobian: Optional[VectorFn] = None,
    ) -> "Nlp":
        """Wrap plain callables; row counts are read from one evaluation at the origin."""
        eq_fn = eq or _empty
        ineq_fn = ineq or _empty
        origin = np.zeros(n_vars)
        lo = np.full(n_vars, -np.inf) if lower is None else np.broadcast_to(np.asarray(lower, float), (n_vars,)).copy()
        hi = np.full(n_vars, np.inf) if upper is None else np.broadcast_to(np.asarray(upper, float), (n_vars,)).copy()
        return cls(
            n_vars=n_vars,
            cost_terms=lambda z: np.atleast_1d(float(cost(z))),
            eq_constraints=lambda z: np.atleast_1d(np.asarray(eq_fn(z), dtype=float)),
            ineq_constraints=lambda z: np.atleast_1d(np.asarray(ineq_fn(z), dtype=float)),
            n_cost_terms=1,
            n_eq=int(np.size(eq_fn(origin))),
            n_ineq=int(np.size(ineq_fn(origin))),
            lower=lo,
            upper=hi,
            jacobian=jacobian,
        )


def _sparsity(tr: Transcription, n_cost: int, n_eq: int, n_ineq: int) -> np.ndarray:
    lay, N = tr.layout, tr.mesh.N
    hs = tr.scheme.is_hermite_simpson
    pattern = np.zeros((n_cost + n_eq + n_ineq, lay.n_vars), dtype=bool)

    def knot_cols(k: int) -> np.ndarray:
        return np.concatenate([lay.state_idx[k], lay.control_idx[k]])

    def mid_cols(k: int) -> np.ndarray:
        if tr.scheme.is_compressed:
            return lay.interval_columns(k)
        return np.concatenate([lay.mid_state_idx[k], lay.mid_control_idx[k]])

    # running-cost nodes in time order, then the terminal term
    row = 0
    for k in range(N + 1):
        pattern[row, knot_cols(k)] = True
        row += 1
        if hs and k < N:
            pattern[row, mid_cols(k)] = True
            row += 1
    if row < n_cost:
        pattern[row, lay.state_idx[N]] = True
        row += 1

    per = tr.defect_rows_per_interval
    for k in range(N):
        pattern[row : row + per, lay.interval_columns(k)] = True
        row += per
    n_b = tr.ocp.n_b
    if n_b:
        pattern[row : row + n_b, np.concatenate([lay.state_idx[0], lay.state_idx[N]])] = True
        row += n_b

    n_p = tr.ocp.n_p
    for k in range(N + 1 if n_p else 0):
        pattern[row : row + n_p, knot_cols(k)] = True
        row += n_p
    if tr.path_at_midpoints:
        for k in range(N):
            pattern[row : row + n_p, mid_cols(k)] = True
            row += n_p
    return pattern


def _bounds(tr: Transcription):
    lay = tr.layout
    lower = np.full(lay.n_vars, -np.inf)
    upper = np.full(lay.n_vars, np.inf)
    if tr.ocp.state_bounds is not None:
        lo, hi = tr.ocp.state_bounds
        for idx in (lay.state_idx, lay.mid_state_idx):
            if idx is not None:
                lower[idx] = lo
                upper[idx] = hi
    if tr.ocp.control_bounds is not None:
        lo, hi = tr.ocp.control_bounds
        for idx in (lay.control_idx, lay.mid_control_idx):
            if idx is not None:
                lower[idx] = lo
                upper[idx] = hi
    return lower, upper


def transcribe(ocp: OcpDefinition, scheme: SchemeId, mesh: Mesh) -> Nlp:
    """Flatten a problem into an Nlp for the given scheme and mesh.

    Order-1 schemes lift higher-order problems first. Equalities are the
    collocation defects (interval-major) followed by the boundary rows;
    inequalities are path constraints at the knots, and at the midpoints
    when the problem asks for it.

    Raises:
      SchemeMismatchError when the scheme order fits neither the problem
      order nor 1.
    """
    tr = Transcription.build(ocp, scheme, mesh)
    problem = tr.ocp

    n_cost = (2 * mesh.N + 1 if scheme.is_hermite_simpson else mesh.N + 1) + (problem.terminal_cost is not None)
    n_eq = tr.defect_rows_per_interval * mesh.N + problem.n_b
    n_ineq = tr.n_path_rows

    size = problem_size(scheme, problem.n_x, problem.n_u, problem.n_b, mesh.N)
    if (size.n_vars, size.n_eq) != (tr.layout.n_vars, n_eq):
        raise DimensionError(
            f"Transcription size ({tr.layout.n_vars}, {n_eq}) disagrees with ({size.n_vars}, {size.n_eq})"
        )

    def _cost_terms(z):
        return cost_terms(tr, tr.evaluate(z))

    def _eq(z):
        nv = tr.evaluate(z)
        return np.concatenate([tr.defects(nv), tr.boundary(nv)])

    def _ineq(z):
        return tr.path(tr.evaluate(z))

    def _stacked(z):
        nv = tr.evaluate(z)
        return np.concatenate([cost_terms(tr, nv), tr.defects(nv), tr.boundary(nv), tr.path(nv)])

    lower, upper = _bounds(tr)
    logger.debug(
        "transcribed %s with %s (N=%d): n_vars=%d n_eq=%d n_ineq=%d n_dof=%d",
        ocp.name or "problem",
        scheme.label,
        mesh.N,
        size.n_vars,
        n_eq,
        n_ineq,
        size.n_dof,
    )
    return Nlp(
        n_vars=tr.layout.n_vars,
        cost_terms=_cost_terms,
        eq_constraints=_eq,
        ineq_constraints=_ineq,
        n_cost_terms=n_cost,
        n_eq=n_eq,
        n_ineq=n_ineq,
        lower=lower,
        upper=upper,
        sparsity=_sparsity(tr, n_cost, n_eq, n_ineq),
        stacked_fn=_stacked,
        layout=tr.layout,
        transcription=tr,
    )
