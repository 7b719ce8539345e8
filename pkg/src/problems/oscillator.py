"""Harmonic oscillator q'' = -omega^2 q + u with a closed-form unforced solution.

The problem fixes the initial state and minimizes the integral of u^2, so
the optimum is u = 0 and the trajectory is the free oscillation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from core.errors import ValidationError
from model.ocp import OcpDefinition


@dataclass(frozen=True)
class OscillatorSolution:
    omega: float
    q0: float
    v0: float

    def position(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        w = self.omega
        return self.q0 * np.cos(w * t) + (self.v0 / w) * np.sin(w * t)

    def velocity(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        w = self.omega
        return -self.q0 * w * np.sin(w * t) + self.v0 * np.cos(w * t)

    def state(self, t) -> np.ndarray:
        return np.stack([self.position(t), self.velocity(t)], axis=-1)

    def control(self, t) -> np.ndarray:
        return np.zeros(np.shape(t) + (1,))

    def energy(self, t) -> np.ndarray:
        return self.velocity(t) ** 2 + self.omega**2 * self.position(t) ** 2


def exact_solution(omega: float = 1.0, q0: float = 1.0, v0: float = 0.0) -> OscillatorSolution:
    if not omega > 0:
        raise ValidationError("omega must be positive")
    return OscillatorSolution(omega=float(omega), q0=float(q0), v0=float(v0))


def oscillator(
    omega: float = 1.0,
    *,
    t_f: float = 2.0 * np.pi,
    q0: float = 1.0,
    v0: float = 0.0,
) -> OcpDefinition:
    if not omega > 0:
        raise ValidationError("omega must be positive")
    w2 = float(omega) ** 2
    start = np.array([q0, v0], dtype=float)

    def dynamics(levels: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        return -w2 * levels[..., 0, :] + u

    def running_cost(x: np.ndarray, u: np.ndarray, t: np.ndarray) -> np.ndarray:
        return np.sum(u * u, axis=-1)

    def boundary(x0: np.ndarray, xf: np.ndarray, t_f: float) -> np.ndarray:
        return x0 - start

    return OcpDefinition(
        n_q=1,
        n_u=1,
        order=2,
        dynamics=dynamics,
        t_f=t_f,
        running_cost=running_cost,
        boundary_constraints=boundary,
        n_b=2,
        units=("m",),
        name="oscillator",
    )
