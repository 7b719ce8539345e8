"""Name-based access to the benchmark problems.

Exposes get_problem / get_entry for the CLI and MCP tools. The bipedal
walking and robot-arm throwing benchmarks need an external multibody
dynamics engine and are registered only to report that.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, List

import numpy as np

from core.errors import NotFoundError, UnsupportedProblemError, ValidationError
from model.ocp import OcpDefinition
from problems.cartpole import cartpole, cartpole_waypoints
from problems.oscillator import exact_solution, oscillator
from problems.triple_integrator import triple_integrator


@dataclass(frozen=True)
class ProblemEntry:
    name: str
    description: str
    build: Callable[[], OcpDefinition]
    waypoints: Callable[[OcpDefinition], np.ndarray]


def _oscillator_waypoints(ocp: OcpDefinition) -> np.ndarray:
    # hold the initial state
    return exact_solution().state(np.zeros(1))


def _triple_waypoints(ocp: OcpDefinition) -> np.ndarray:
    return np.array([np.zeros(3), [1.0, 0.0, 0.0]])


PROBLEMS: Dict[str, ProblemEntry] = {
    "cartpole": ProblemEntry(
        name="cartpole",
        description="Cart-pole swing-up, rest to rest, minimum integral of u^2",
        build=cartpole,
        waypoints=lambda ocp: cartpole_waypoints(),
    ),
    "oscillator": ProblemEntry(
        name="oscillator",
        description="Harmonic oscillator from (1, 0), minimum integral of u^2 (free oscillation)",
        build=oscillator,
        waypoints=_oscillator_waypoints,
    ),
    "triple_integrator": ProblemEntry(
        name="triple_integrator",
        description="Third-order rest-to-rest reposition, minimum integral of jerk^2",
        build=triple_integrator,
        waypoints=_triple_waypoints,
    ),
}

UNSUPPORTED: Dict[str, str] = {
    "biped": "bipedal walking needs a heel-strike map and an external multibody model",
    "panda": "robot-arm ball throwing needs an external rigid-body dynamics engine",
}


def get_entry(name: str) -> ProblemEntry:
    key = (name or "").strip()
    if not key:
        raise ValidationError("Problem name is empty")
    if key in UNSUPPORTED:
        raise UnsupportedProblemError(f"Problem '{key}' is not available: {UNSUPPORTED[key]}")
    try:
        return PROBLEMS[key]
    except KeyError as e:
        raise NotFoundError(f"unknown problem: {key}") from e


def get_problem(name: str) -> OcpDefinition:
    return get_entry(name).build()


def list_problems() -> List[str]:
    return sorted(PROBLEMS)


def describe_problem(name: str) -> dict:
    entry = get_entry(name)
    ocp = entry.build()
    return {
        "name": entry.name,
        "description": entry.description,
        "order": ocp.order,
        "n_q": ocp.n_q,
        "n_u": ocp.n_u,
        "n_b": ocp.n_b,
        "t_f": ocp.t_f,
        "units": list(ocp.units),
    }
