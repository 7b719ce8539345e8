"""Decision-vector layout for a transcribed problem.

Nodes are stored in time order. Trapezoidal meshes hold one [x, u] block
per knot. Hermite-Simpson separated meshes add an [x, u] block at every
midpoint; the compressed form keeps only the midpoint control [u].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from core.errors import ValidationError
from core.models import Mesh, SchemeId


@dataclass(frozen=True)
class VariableLayout:
    """Index arrays mapping (node, role) to positions in the decision vector.

    Field groups:
    - Knots: state_idx (N+1, n_x), control_idx (N+1, n_u)
    - Midpoints: mid_state_idx (N, n_x) for separated Hermite-Simpson,
      mid_control_idx (N, n_u) for both Hermite-Simpson forms
    """

    n_vars: int
    order: int
    n_q: int
    n_u: int
    state_idx: np.ndarray
    control_idx: np.ndarray
    mid_state_idx: Optional[np.ndarray] = None
    mid_control_idx: Optional[np.ndarray] = None

    @property
    def n_x(self) -> int:
        return self.order * self.n_q

    @classmethod
    def build(cls, scheme: SchemeId, mesh: Mesh, *, n_q: int, n_u: int) -> "VariableLayout":
        N, M = mesh.N, scheme.order
        n_x = M * n_q
        node = n_x + n_u

        if not scheme.is_hermite_simpson:
            base = node * np.arange(N + 1)
            return cls(
                n_vars=node * (N + 1),
                order=M,
                n_q=n_q,
                n_u=n_u,
                state_idx=base[:, None] + np.arange(n_x),
                control_idx=base[:, None] + n_x + np.arange(n_u),
            )

        if scheme.is_compressed:
            period = node + n_u
            knot_base = period * np.arange(N + 1)
            mid_base = knot_base[:-1] + node
            return cls(
                n_vars=period * N + node,
                order=M,
                n_q=n_q,
                n_u=n_u,
                state_idx=knot_base[:, None] + np.arange(n_x),
                control_idx=knot_base[:, None] + n_x + np.arange(n_u),
                mid_control_idx=mid_base[:, None] + np.arange(n_u),
            )

        knot_base = 2 * node * np.arange(N + 1)
        mid_base = knot_base[:-1] + node
        return cls(
            n_vars=node * (2 * N + 1),
            order=M,
            n_q=n_q,
            n_u=n_u,
            state_idx=knot_base[:, None] + np.arange(n_x),
            control_idx=knot_base[:, None] + n_x + np.arange(n_u),
            mid_state_idx=mid_base[:, None] + np.arange(n_x),
            mid_control_idx=mid_base[:, None] + n_x + np.arange(n_u),
        )

    def index_of(self, node: int, role: Union[int, str], coord: int, *, midpoint: bool = False) -> int:
        """Flat index of q-level ``role`` (an int) or control ``"u"`` at a node."""
        if role == "u":
            table = self.mid_control_idx if midpoint else self.control_idx
            if coord >= self.n_u:
                raise ValidationError(f"Control index {coord} out of range")
            column = coord
        else:
            if not isinstance(role, (int, np.integer)) or not 0 <= role < self.order:
                raise ValidationError(f"Level must be within 0..{self.order - 1} or 'u', got {role!r}")
            if coord >= self.n_q:
                raise ValidationError(f"Coordinate index {coord} out of range")
            table = self.mid_state_idx if midpoint else self.state_idx
            column = int(role) * self.n_q + coord
        if table is None:
            raise ValidationError("This layout has no such midpoint variables")
        return int(table[node, column])

    def interval_columns(self, k: int) -> np.ndarray:
        """All variables touched by interval k (both knots and its midpoint)."""
        parts = [self.state_idx[k], self.control_idx[k], self.state_idx[k + 1], self.control_idx[k + 1]]
        if self.mid_state_idx is not None:
            parts.append(self.mid_state_idx[k])
        if self.mid_control_idx is not None:
            parts.append(self.mid_control_idx[k])
        return np.sort(np.concatenate(parts))
