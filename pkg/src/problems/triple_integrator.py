"""Third-order demonstrator: q''' = u, rest-to-rest reposition with minimum integral of u^2.

The continuous optimum is the minimum-jerk quintic.
"""

from __future__ import annotations

import numpy as np

from core.errors import ValidationError
from model.ocp import OcpDefinition


def minimum_jerk(t, *, distance: float = 1.0, t_f: float = 1.0) -> np.ndarray:
    s = np.asarray(t, dtype=float) / t_f
    return distance * (10.0 * s**3 - 15.0 * s**4 + 6.0 * s**5)


def minimum_jerk_control(t, *, distance: float = 1.0, t_f: float = 1.0) -> np.ndarray:
    s = np.asarray(t, dtype=float) / t_f
    return distance / t_f**3 * (60.0 - 360.0 * s + 360.0 * s**2)


def optimal_cost(*, distance: float = 1.0, t_f: float = 1.0) -> float:
    return 720.0 * distance**2 / t_f**5


def triple_integrator(*, distance: float = 1.0, t_f: float = 1.0) -> OcpDefinition:
    if not t_f > 0:
        raise ValidationError("t_f must be positive")
    start = np.zeros(3)
    target = np.array([distance, 0.0, 0.0])

    def dynamics(levels: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.array(u, dtype=float)

    def running_cost(x: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.sum(u * u, axis=-1)

    def boundary(x0: np.ndarray, xf: np.ndarray, t_f: float) -> np.ndarray:
        return np.concatenate([x0 - start, xf - target])

    return OcpDefinition(
        n_q=1,
        n_u=1,
        order=3,
        dynamics=dynamics,
        t_f=t_f,
        running_cost=running_cost,
        boundary_constraints=boundary,
        n_b=6,
        units=("m",),
        name="triple_integrator",
    )
