"""Cart-pole swing-up: move the cart by d while swinging the pole from hanging to inverted.

Angle convention: q2 = 0 hangs below the cart, q2 = pi is inverted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.errors import ValidationError
from model.ocp import OcpDefinition


@dataclass(frozen=True)
class CartPoleParams:
    m1: float = 1.0
    m2: float = 0.3
    ell: float = 0.5
    gravity: float = 9.81
    dist: float = 1.0
    t_f: float = 2.0
    u_max: float = 20.0
    x_max: float = 2.0

    def __post_init__(self) -> None:
        for name in ("m1", "m2", "ell", "gravity", "t_f", "u_max", "x_max"):
            if not getattr(self, name) > 0:
                raise ValidationError(f"{name} must be positive")


def cartpole_dynamics(params: CartPoleParams):
    m1, m2, ell, g = params.m1, params.m2, params.ell, params.gravity

    def dynamics(levels: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        q2 = levels[..., 0, 1]
        dq2 = levels[..., 1, 1]
        force = u[..., 0]
        s, c = np.sin(q2), np.cos(q2)
        denom = m1 + m2 * s * s
        ddq1 = (ell * m2 * s * dq2 * dq2 + force + m2 * g * c * s) / denom
        ddq2 = -(ell * m2 * c * s * dq2 * dq2 + force * c + (m1 + m2) * g * s) / (ell * denom)
        return np.stack([ddq1, ddq2], axis=-1)

    return dynamics


def cartpole_energy(params: CartPoleParams, q: np.ndarray, dq: np.ndarray) -> np.ndarray:
    """Total mechanical energy; constant along unforced motion."""
    m1, m2, ell, g = params.m1, params.m2, params.ell, params.gravity
    q, dq = np.asarray(q, dtype=float), np.asarray(dq, dtype=float)
    dq1, q2, dq2 = dq[..., 0], q[..., 1], dq[..., 1]
    kinetic = 0.5 * (m1 + m2) * dq1**2 + m2 * ell * np.cos(q2) * dq1 * dq2 + 0.5 * m2 * ell**2 * dq2**2
    return kinetic - m2 * g * ell * np.cos(q2)


def cartpole(params: CartPoleParams | None = None) -> OcpDefinition:
    """Rest-to-rest swing-up minimizing the integral of u^2 (n_b = 8)."""
    p = params or CartPoleParams()
    start = np.zeros(4)
    target = np.array([p.dist, np.pi, 0.0, 0.0])

    def running_cost(x: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.sum(u * u, axis=-1)

    def boundary(x0: np.ndarray, xf: np.ndarray, t_f: float) -> np.ndarray:
        return np.concatenate([x0 - start, xf - target])

    return OcpDefinition(
        n_q=2,
        n_u=1,
        order=2,
        dynamics=cartpole_dynamics(p),
        t_f=p.t_f,
        running_cost=running_cost,
        boundary_constraints=boundary,
        n_b=8,
        control_bounds=(np.array([-p.u_max]), np.array([p.u_max])),
        state_bounds=(
            np.array([-p.x_max, -np.inf, -np.inf, -np.inf]),
            np.array([p.x_max, np.inf, np.inf, np.inf]),
        ),
        units=("m", "rad"),
        name="cartpole",
    )


def cartpole_waypoints(params: CartPoleParams | None = None) -> np.ndarray:
    p = params or CartPoleParams()
    return np.array([np.zeros(4), [p.dist, np.pi, 0.0, 0.0]])
