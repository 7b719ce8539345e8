"""Initial guesses: waypoint interpolation and warm starts from earlier trajectories."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from core.errors import DimensionError, ValidationError
from core.models import Mesh, SchemeId
from model.ocp import OcpDefinition
from schemes.interpolant import PolyTrajectory, controls_on_intervals, evaluate_on_intervals, locate
from transcribe.transcription import Transcription


def _fill(tr: Transcription, states_at, controls_at) -> np.ndarray:
    lay, mesh = tr.layout, tr.mesh
    z = np.zeros(lay.n_vars)
    z[lay.state_idx] = states_at(mesh.knots)
    z[lay.control_idx] = controls_at(mesh.knots)
    if lay.mid_state_idx is not None:
        z[lay.mid_state_idx] = states_at(mesh.midpoints)
    if lay.mid_control_idx is not None:
        z[lay.mid_control_idx] = controls_at(mesh.midpoints)
    return z


def assemble_initial_guess(
    ocp: OcpDefinition,
    scheme: SchemeId,
    mesh: Mesh,
    waypoints: Sequence,
    times: Optional[Sequence[float]] = None,
) -> np.ndarray:
    """Decision vector with states interpolated through waypoints and u = 0.

    Params:
      - waypoints: flat states (W, n_x); a single waypoint is held constant.
      - times: waypoint times, increasing; defaults to W evenly spaced
        times over [0, t_f].

    Raises:
      ValidationError on an empty waypoint list or bad times;
      DimensionError when a waypoint is not n_x long.
    """
    tr = Transcription.build(ocp, scheme, mesh)
    n_x = tr.ocp.n_x
    W = np.asarray(waypoints, dtype=float)
    if W.size == 0:
        raise ValidationError("At least one waypoint is required")
    if W.ndim == 1:
        # scalar states may be listed as a flat sequence
        W = W.reshape(-1, 1) if n_x == 1 else W.reshape(1, -1)
    W = W.reshape(W.shape[0], -1)
    if W.shape[1] != n_x:
        raise DimensionError(f"Waypoints must have {n_x} entries, got {W.shape[1]}")

    if times is None:
        T = np.linspace(0.0, ocp.t_f, W.shape[0]) if W.shape[0] > 1 else np.zeros(1)
    else:
        T = np.asarray(times, dtype=float).reshape(-1)
        if T.shape != (W.shape[0],):
            raise ValidationError("times and waypoints must have the same length")
        if np.any(np.diff(T) <= 0):
            raise ValidationError("Waypoint times must be strictly increasing")

    def states_at(t: np.ndarray) -> np.ndarray:
        return np.stack([np.interp(t, T, W[:, i]) for i in range(n_x)], axis=-1)

    def controls_at(t: np.ndarray) -> np.ndarray:
        return np.zeros((t.size, tr.ocp.n_u))

    return _fill(tr, states_at, controls_at)


def guess_from_trajectory(ocp: OcpDefinition, scheme: SchemeId, mesh: Mesh, traj: PolyTrajectory) -> np.ndarray:
    """Warm start: sample a previously solved trajectory on a new mesh."""
    tr = Transcription.build(ocp, scheme, mesh)
    levels = traj.order
    if traj.n_q * levels != tr.ocp.n_x:
        raise DimensionError(f"Trajectory carries {traj.n_q * levels} states, problem needs {tr.ocp.n_x}")
    if traj.n_u != tr.ocp.n_u:
        raise DimensionError(f"Trajectory carries {traj.n_u} controls, problem needs {tr.ocp.n_u}")

    def states_at(t: np.ndarray) -> np.ndarray:
        idx, tau = locate(traj, t)
        parts = [evaluate_on_intervals(traj, idx, tau, r) for r in range(levels)]
        return np.concatenate(parts, axis=-1)

    def controls_at(t: np.ndarray) -> np.ndarray:
        idx, tau = locate(traj, t)
        return controls_on_intervals(traj, idx, tau)

    return _fill(tr, states_at, controls_at)
