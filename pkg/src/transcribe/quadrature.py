"""Cost quadrature: composite trapezoid over knots, composite Simpson over knots and midpoints."""

from __future__ import annotations

import numpy as np

from core.models import Mesh, SchemeId
from model.ocp import OcpDefinition
from transcribe.transcription import NodeValues, Transcription


def quadrature_weights(scheme: SchemeId, mesh: Mesh) -> np.ndarray:
    """Weights of the quadrature nodes in time order."""
    h, N = mesh.h, mesh.N
    if scheme.is_hermite_simpson:
        w = np.empty(2 * N + 1)
        w[0::2] = h / 3.0
        w[1::2] = 2.0 * h / 3.0
        w[0] = w[-1] = h / 6.0
        return w
    w = np.full(N + 1, h)
    w[0] = w[-1] = h / 2.0
    return w


def cost_terms(tr: Transcription, nv: NodeValues) -> np.ndarray:
    """Weighted running-cost samples, then the terminal cost if any."""
    t, X, U = tr.node_samples(nv)
    L = np.asarray(tr.ocp.running_cost(X, U, t), dtype=float).reshape(-1)
    terms = quadrature_weights(tr.scheme, tr.mesh) * L
    if tr.ocp.terminal_cost is None:
        return terms
    K = float(tr.ocp.terminal_cost(nv.X[-1], tr.ocp.t_f))
    return np.append(terms, K)


def quadrature_cost(ocp: OcpDefinition, scheme: SchemeId, mesh: Mesh, z) -> float:
    tr = Transcription.build(ocp, scheme, mesh)
    return float(np.sum(cost_terms(tr, tr.evaluate(z))))
