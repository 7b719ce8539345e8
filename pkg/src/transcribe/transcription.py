"""Evaluation of a problem on a collocation mesh.

A Transcription binds a (possibly lifted) problem, a scheme and a mesh to
a variable layout, and turns a decision vector into node samples,
collocation defects, boundary and path values and the reconstructed
PolyTrajectory.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from core.errors import DimensionError, SchemeMismatchError
from core.models import Mesh, SchemeId
from model.ocp import OcpDefinition, lift_to_first_order
from schemes.interpolant import PolyTrajectory, build_interpolant
from schemes.steps import hs_midpoint, hs_step, tz_step
from transcribe.layout import VariableLayout


def prepare_problem(ocp: OcpDefinition, scheme: SchemeId) -> OcpDefinition:
    """The problem a scheme transcribes: as is, or lifted for order-1 schemes."""
    if scheme.order == ocp.order:
        return ocp
    if scheme.order == 1:
        return lift_to_first_order(ocp)
    raise SchemeMismatchError(
        f"Scheme {scheme.label} has order {scheme.order}, problem has order {ocp.order}"
    )


@dataclass(frozen=True)
class NodeValues:
    """Knot (and midpoint) samples extracted from one decision vector."""

    X: np.ndarray
    U: np.ndarray
    G: np.ndarray
    Xc: Optional[np.ndarray] = None
    Uc: Optional[np.ndarray] = None
    Gc: Optional[np.ndarray] = None


def interleave(knot_rows: np.ndarray, mid_rows: np.ndarray) -> np.ndarray:
    out = np.empty((knot_rows.shape[0] + mid_rows.shape[0],) + knot_rows.shape[1:])
    out[0::2] = knot_rows
    out[1::2] = mid_rows
    return out


@dataclass(frozen=True)
class Transcription:
    ocp: OcpDefinition
    source: OcpDefinition
    scheme: SchemeId
    mesh: Mesh
    layout: VariableLayout

    @classmethod
    def build(cls, ocp: OcpDefinition, scheme: SchemeId, mesh: Mesh) -> "Transcription":
        problem = prepare_problem(ocp, scheme)
        layout = VariableLayout.build(scheme, mesh, n_q=problem.n_q, n_u=problem.n_u)
        return cls(ocp=problem, source=ocp, scheme=scheme, mesh=mesh, layout=layout)

    @property
    def defect_rows_per_interval(self) -> int:
        n_x = self.ocp.n_x
        if self.scheme.is_hermite_simpson and not self.scheme.is_compressed:
            return 2 * n_x
        return n_x

    @property
    def n_path_rows(self) -> int:
        rows = self.ocp.n_p * (self.mesh.N + 1)
        if self.path_at_midpoints:
            rows += self.ocp.n_p * self.mesh.N
        return rows

    @property
    def path_at_midpoints(self) -> bool:
        return self.scheme.is_hermite_simpson and self.ocp.path_at_midpoints and self.ocp.n_p > 0

    def _levels(self, X: np.ndarray) -> np.ndarray:
        # (K, n_x) -> (M, K, n_q)
        return np.moveaxis(X.reshape(X.shape[0], self.ocp.order, self.ocp.n_q), 1, 0)

    def _flat(self, levels: np.ndarray) -> np.ndarray:
        return np.moveaxis(levels, 0, 1).reshape(levels.shape[1], self.ocp.n_x)

    def dynamics(self, X: np.ndarray, U: np.ndarray, t: np.ndarray) -> np.ndarray:
        stack = X.reshape(X.shape[0], self.ocp.order, self.ocp.n_q)
        g = np.asarray(self.ocp.dynamics(stack, U, t), dtype=float)
        if g.shape != (X.shape[0], self.ocp.n_q):
            raise DimensionError(f"dynamics returned shape {g.shape}, expected {(X.shape[0], self.ocp.n_q)}")
        return g

    def evaluate(self, z) -> NodeValues:
        z = np.asarray(z, dtype=float)
        if z.shape != (self.layout.n_vars,):
            raise DimensionError(f"Decision vector must have {self.layout.n_vars} entries, got shape {z.shape}")
        M, h = self.ocp.order, self.mesh.h
        X = z[self.layout.state_idx]
        U = z[self.layout.control_idx]
        G = self.dynamics(X, U, self.mesh.knots)
        if not self.scheme.is_hermite_simpson:
            return NodeValues(X=X, U=U, G=G)

        Uc = z[self.layout.mid_control_idx]
        if self.scheme.is_compressed:
            levels = hs_midpoint(M, self._levels(X[:-1]), self._levels(X[1:]), G[:-1], G[1:], h)
            Xc = self._flat(levels)
        else:
            Xc = z[self.layout.mid_state_idx]
        Gc = self.dynamics(Xc, Uc, self.mesh.midpoints)
        return NodeValues(X=X, U=U, G=G, Xc=Xc, Uc=Uc, Gc=Gc)

    def defects(self, nv: NodeValues) -> np.ndarray:
        """Collocation residuals (stored - predicted), interval-major."""
        M, h = self.ocp.order, self.mesh.h
        y_k = self._levels(nv.X[:-1])
        y_k1 = self._levels(nv.X[1:])

        if not self.scheme.is_hermite_simpson:
            res = self._flat(y_k1 - tz_step(M, y_k, nv.G[:-1], nv.G[1:], h))
        elif self.scheme.is_compressed:
            y_end, _ = hs_step(M, y_k, None, nv.G[:-1], nv.Gc, nv.G[1:], h, eliminate_gc=False)
            res = self._flat(y_k1 - y_end)
        else:
            y_end, y_mid = hs_step(M, y_k, y_k1, nv.G[:-1], nv.Gc, nv.G[1:], h)
            res = np.concatenate(
                [self._flat(y_k1 - y_end), self._flat(self._levels(nv.Xc) - y_mid)], axis=1
            )
        return res.reshape(-1)

    def boundary(self, nv: NodeValues) -> np.ndarray:
        if self.ocp.boundary_constraints is None:
            return np.zeros(0)
        b = np.asarray(self.ocp.boundary_constraints(nv.X[0], nv.X[-1], self.ocp.t_f), dtype=float).reshape(-1)
        if b.shape != (self.ocp.n_b,):
            raise DimensionError(f"boundary_constraints returned {b.size} values, expected {self.ocp.n_b}")
        return b

    def path(self, nv: NodeValues) -> np.ndarray:
        if self.ocp.path_constraints is None:
            return np.zeros(0)
        rows = [np.asarray(self.ocp.path_constraints(nv.X, nv.U), dtype=float).reshape(-1)]
        if self.path_at_midpoints:
            rows.append(np.asarray(self.ocp.path_constraints(nv.Xc, nv.Uc), dtype=float).reshape(-1))
        out = np.concatenate(rows)
        if out.shape != (self.n_path_rows,):
            raise DimensionError(f"path_constraints returned {out.size} values, expected {self.n_path_rows}")
        return out

    def node_samples(self, nv: NodeValues) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Times, states and controls of every quadrature node in time order."""
        if not self.scheme.is_hermite_simpson:
            return self.mesh.knots, nv.X, nv.U
        t = interleave(self.mesh.knots, self.mesh.midpoints)
        return t, interleave(nv.X, nv.Xc), interleave(nv.U, nv.Uc)

    def trajectory(self, z) -> PolyTrajectory:
        nv = self.evaluate(z)
        N = self.mesh.N
        knot_values = nv.X.reshape(N + 1, self.ocp.order, self.ocp.n_q)
        samples = nv.G if nv.Gc is None else interleave(nv.G, nv.Gc)
        return build_interpolant(
            self.scheme,
            knot_values,
            samples,
            self.mesh,
            controls=nv.U,
            mid_controls=nv.Uc,
        )
